use std::collections::VecDeque;

use super::{extract_features, FeatureVector, LabeledSample, NetworkEnvironment};
use crate::error::{invalid, Result};
use crate::exec::{self, ExecMode};
use crate::policy::{ThresholdPolicy, ThresholdSchedule, ThresholdSet};
use crate::rng;
use crate::sim::{self, SimConfig};
use crate::traffic::{LoadModel, Scenario};

/// Default utilization grid, 0.1 to 0.9.
pub const UTILIZATION_LEVELS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Arrivals simulated before the first sample is taken.
const SAMPLER_WARMUP: u64 = 2_000;
/// Preceding arrivals stored with each sample. The input recurrence
/// contracts by at least 4× per step, so older arrivals barely register.
pub const CONTEXT_ARRIVALS: usize = 4;
/// Arrivals between consecutive samples of one trajectory.
const SAMPLE_SPACING: u64 = 7;

/// One scenario per default utilization level.
pub fn default_scenarios(capacity: u32, load: LoadModel) -> Result<Vec<Scenario>> {
    UTILIZATION_LEVELS.iter().map(|&a| Scenario::at_load(a, capacity, load)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub capacity: u32,
    pub levels: Vec<f64>,
    pub load: LoadModel,
    /// Candidates are all A1 < A2 < A3 ≤ `max_threshold`.
    pub max_threshold: u32,
    pub arrivals: u64,
    pub replications: usize,
    pub seed: u64,
    pub exec: ExecMode,
}

impl SearchConfig {
    pub fn new(capacity: u32, seed: u64) -> Self {
        Self {
            capacity,
            levels: UTILIZATION_LEVELS.to_vec(),
            load: LoadModel::PerChannel,
            max_threshold: 8,
            arrivals: 20_000,
            replications: 2,
            seed,
            exec: ExecMode::default(),
        }
    }
}

/// For every utilization level, simulates each candidate threshold set with
/// common random numbers and keeps the one with the lowest aggregate
/// blocking. Ties keep the lexicographically smallest set.
pub fn search_thresholds(cfg: &SearchConfig) -> Result<ThresholdSchedule> {
    if cfg.levels.is_empty() {
        return Err(invalid("threshold search needs at least one utilization level"));
    }
    let candidates: Vec<ThresholdSet> = ThresholdSet::enumerate(cfg.max_threshold)
        .into_iter()
        .filter(|t| t.validate_for(cfg.capacity).is_ok())
        .collect();
    if candidates.is_empty() {
        return Err(invalid(format!("no threshold set with A3 <= {} fits capacity {}", cfg.max_threshold, cfg.capacity)));
    }
    let mut sim_cfg = SimConfig::new(cfg.arrivals, cfg.seed, cfg.replications);
    sim_cfg.exec = ExecMode::Sequential;
    let mut levels = Vec::with_capacity(cfg.levels.len());
    for &a in &cfg.levels {
        let scenario = Scenario::at_load(a, cfg.capacity, cfg.load)?;
        let blocking = exec::map_indexed(cfg.exec, candidates.len(), |i| {
            sim::replicate(&scenario, &ThresholdPolicy::new(candidates[i]), &sim_cfg).map(|m| m.aggregate.blocking)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        let mut best = 0;
        for (i, &b) in blocking.iter().enumerate() {
            if b < blocking[best] {
                best = i;
            }
        }
        levels.push((a, candidates[best]));
    }
    Ok(ThresholdSchedule { levels })
}

/// Samples `size` arrival states from oracle-controlled trajectories of
/// `scenarios` (round robin) and labels each with the oracle's decision.
pub fn generate_training_set(
    scenarios: &[Scenario],
    oracle: &ThresholdSchedule,
    env: &NetworkEnvironment,
    size: usize,
    seed: u64,
) -> Result<Vec<LabeledSample>> {
    if size == 0 {
        return Err(invalid("training set size must be at least 1"));
    }
    if scenarios.is_empty() {
        return Err(invalid("at least one scenario is required"));
    }
    env.validate()?;
    let k = scenarios.len();
    let per: Vec<usize> = (0..k).map(|j| size / k + usize::from(j < size % k)).collect();
    let mut out = Vec::with_capacity(size);
    for (j, scenario) in scenarios.iter().enumerate() {
        if per[j] == 0 {
            continue;
        }
        let mut local_env = env.resized(scenario.capacity);
        let a = scenario.aggregate_utilization;
        let total = SAMPLER_WARMUP + per[j] as u64 * SAMPLE_SPACING;
        let cfg = SimConfig::new(total, seed, 1);
        let mut policy = ThresholdPolicy::scheduled(oracle.clone());
        let mut failure = None;
        let mut recent: VecDeque<FeatureVector> = VecDeque::with_capacity(CONTEXT_ARRIVALS + 1);
        let traj_seed = rng::derive_seed(rng::derive_seed(seed, rng::streams::TRAINING_SAMPLER), j as u64);
        sim::run_observed(scenario, &mut policy, &cfg, traj_seed, |o| {
            let (Some(decision), sim::EventKind::Arrival { class }) = (o.decision, o.kind) else {
                return;
            };
            let c = &scenario.classes[class];
            let features = match local_env
                .set_load(o.state_before.occupied_channels())
                .and_then(|_| extract_features(&local_env, c, a))
            {
                Ok(f) => f,
                Err(e) => {
                    failure.get_or_insert(e);
                    return;
                }
            };
            let take = o.arrival_index > SAMPLER_WARMUP && (o.arrival_index - SAMPLER_WARMUP) % SAMPLE_SPACING == 0;
            if take {
                out.push(LabeledSample {
                    features: features.clone(),
                    history: recent.iter().cloned().collect(),
                    label: if decision.is_admit() { 1.0 } else { 0.0 },
                    class_id: c.id,
                    demand: c.channel_demand,
                    free_channels: o.state_before.free_channels(),
                    utilization: a,
                });
            }
            if recent.len() == CONTEXT_ARRIVALS {
                recent.pop_front();
            }
            recent.push_back(features);
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
    }
    debug_assert_eq!(out.len(), size);
    Ok(out)
}
