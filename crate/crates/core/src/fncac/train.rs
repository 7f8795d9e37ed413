use rand::seq::SliceRandom;

use super::data::{generate_training_set, search_thresholds, SearchConfig};
use super::{FeatureVector, LabeledSample, NetworkEnvironment};
use crate::error::{invalid, Result};
use crate::policy::fuzzy::ADMIT_SCORE;
use crate::policy::ThresholdSchedule;
use crate::rng;
use crate::traffic::Scenario;
use crate::rrbfn::{init_model, train_gradient_descent, RrbfnConfig, RrbfnModel, Sample, TrainingSet};

#[derive(Debug, Clone, PartialEq)]
pub struct FncacConfig {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub step_size: f64,
    /// Share of the samples used for training; the rest is held out.
    pub train_fraction: f64,
    pub width_init: f64,
    pub recurrent_std: f64,
    pub output_init: f64,
}

impl Default for FncacConfig {
    fn default() -> Self {
        Self::desk()
    }
}

impl FncacConfig {
    pub fn desk() -> Self {
        Self {
            hidden: vec![16, 8],
            epochs: 5_000,
            step_size: 0.05,
            train_fraction: 0.8,
            width_init: 1.0,
            recurrent_std: 0.5,
            output_init: 0.5,
        }
    }

    /// 200 → 200 hidden units.
    pub fn paper_scale() -> Self {
        Self {
            hidden: vec![200, 200],
            ..Self::desk()
        }
    }

    pub fn network(&self, input_size: usize) -> RrbfnConfig {
        RrbfnConfig {
            width_init: self.width_init,
            recurrent_std: self.recurrent_std,
            output_init: self.output_init,
            ..RrbfnConfig::new(input_size, self.hidden.clone())
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(invalid(format!("train fraction must lie in (0, 1), got {}", self.train_fraction)));
        }
        self.network(1).validate()
    }
}

/// A trained controller: the network plus the feature map it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct FncacModel {
    /// Idle RAT layout; loads are filled in per decision.
    pub env: NetworkEnvironment,
    pub network: RrbfnModel,
    /// Threshold schedule that labelled the training data, if known.
    pub oracle: Option<ThresholdSchedule>,
}

impl FncacModel {
    pub fn arity(&self) -> usize {
        FeatureVector::arity(self.env.rats.len())
    }

    /// Score of a labelled request: the input state is reset, the
    /// preceding arrivals are replayed, then the request itself is scored.
    pub fn score_sample(&mut self, sample: &LabeledSample) -> Result<f64> {
        self.network.reset_state();
        for h in &sample.history {
            self.network.step(h.as_slice())?;
        }
        self.network.step(sample.features.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FncacReport {
    pub samples: usize,
    pub train_size: usize,
    pub test_size: usize,
    pub epochs: usize,
    pub initial_loss: f64,
    pub final_loss: f64,
    pub admit_fraction: f64,
    pub train_accuracy: f64,
    pub heldout_accuracy: f64,
}

fn admits(score: f64, s: &LabeledSample) -> bool {
    s.free_channels >= s.demand && score >= ADMIT_SCORE
}

/// Share of `samples` whose guarded decision matches the label. Samples are
/// scored independently of each other.
pub fn evaluate_accuracy(model: &mut FncacModel, samples: &[LabeledSample]) -> Result<f64> {
    if samples.is_empty() {
        return Err(invalid("no samples to evaluate"));
    }
    let mut hits = 0usize;
    for s in samples {
        let score = model.score_sample(s)?;
        if admits(score, s) == (s.label >= 0.5) {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples.len() as f64)
}

fn to_training_set(samples: &[LabeledSample]) -> Result<TrainingSet> {
    TrainingSet::new(
        samples
            .iter()
            .map(|s| Sample {
                inputs: s.sequence(),
                target: s.label,
            })
            .collect(),
    )
}

/// Splits the samples 80/20 (by `config.train_fraction`) after a seeded
/// shuffle, trains the network by gradient descent, and reports held-out
/// decision accuracy.
pub fn train_fncac(
    data: &[LabeledSample],
    env: &NetworkEnvironment,
    config: &FncacConfig,
    seed: u64,
) -> Result<(FncacModel, FncacReport)> {
    config.validate()?;
    env.validate()?;
    if data.len() < 2 {
        return Err(invalid("need at least two samples to split into train and test sets"));
    }
    let arity = FeatureVector::arity(env.rats.len());
    if let Some(bad) = data.iter().find(|s| s.features.values.len() != arity) {
        return Err(crate::CacError::ArityMismatch {
            expected: arity,
            actual: bad.features.values.len(),
        });
    }
    let mut order: Vec<usize> = (0..data.len()).collect();
    order.shuffle(&mut rng::stream(seed, rng::streams::SPLIT));
    let n_train = ((data.len() as f64 * config.train_fraction).round() as usize).clamp(1, data.len() - 1);
    let train: Vec<LabeledSample> = order[..n_train].iter().map(|&i| data[i].clone()).collect();
    let test: Vec<LabeledSample> = order[n_train..].iter().map(|&i| data[i].clone()).collect();

    let mut network = init_model(&config.network(arity), seed)?;
    let set = to_training_set(&train)?;
    let report = train_gradient_descent(&mut network, &set, config.epochs, config.step_size)?;
    let initial_loss = report.epoch_losses.first().copied().unwrap_or(report.final_loss);
    let mut model = FncacModel {
        env: env.resized(env.capacity()),
        network,
        oracle: None,
    };
    let train_accuracy = evaluate_accuracy(&mut model, &train)?;
    let heldout_accuracy = evaluate_accuracy(&mut model, &test)?;
    model.network.reset_state();
    let admit_fraction = data.iter().filter(|s| s.label >= 0.5).count() as f64 / data.len() as f64;
    Ok((
        model,
        FncacReport {
            samples: data.len(),
            train_size: train.len(),
            test_size: test.len(),
            epochs: config.epochs,
            initial_loss,
            final_loss: report.final_loss,
            admit_fraction,
            train_accuracy,
            heldout_accuracy,
        },
    ))
}

/// Everything needed to go from a master seed to a trained controller.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub search: SearchConfig,
    pub samples: usize,
    pub env: NetworkEnvironment,
    pub train: FncacConfig,
}

impl PipelineConfig {
    /// Desk-scale defaults: 1000 samples over the default utilization grid.
    pub fn new(capacity: u32, seed: u64) -> Self {
        Self {
            search: SearchConfig::new(capacity, seed),
            samples: 1000,
            env: NetworkEnvironment::default_for(capacity),
            train: FncacConfig::desk(),
        }
    }
}

/// Threshold search, sample generation and training, all seeded from
/// `cfg.search.seed`. The returned model carries the oracle schedule.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<(FncacModel, FncacReport)> {
    let seed = cfg.search.seed;
    let schedule = search_thresholds(&cfg.search)?;
    let scenarios = cfg
        .search
        .levels
        .iter()
        .map(|&a| Scenario::at_load(a, cfg.search.capacity, cfg.search.load))
        .collect::<Result<Vec<_>>>()?;
    let data = generate_training_set(&scenarios, &schedule, &cfg.env, cfg.samples, seed)?;
    let (mut model, report) = train_fncac(&data, &cfg.env, &cfg.train, seed)?;
    model.oracle = Some(schedule);
    Ok((model, report))
}
