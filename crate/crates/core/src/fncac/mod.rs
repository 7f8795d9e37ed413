//! Fuzzy-neural admission controller.
//!
//! The controller sees the cell as a set of co-located radio access
//! technologies (RATs) sharing the channel pool. Each request is encoded as
//!
//! ```text
//! [occ_1 .. occ_K, onehot_type1, onehot_type2, onehot_type3, a, cost]
//! ```
//!
//! where `occ_k` is the occupancy ratio of RAT k, `a` the aggregate
//! utilization and `cost` the normalized price of carrying the request on
//! the least-loaded RAT. A recurrent RBF network maps the vector to a score;
//! the call is admitted when the score reaches 0.5 and the call fits.
//!
//! Training labels come from a threshold policy whose thresholds are found
//! by simulated exhaustive search at each utilization level.

mod data;
mod io;
mod policy;
mod train;

pub use data::{default_scenarios, CONTEXT_ARRIVALS, generate_training_set, search_thresholds, SearchConfig, UTILIZATION_LEVELS};
pub use io::{read_fncac, write_fncac, FNCAC_FORMAT_VERSION};
pub use policy::{decide_fncac, FncacPolicy};
pub use train::{evaluate_accuracy, run_pipeline, train_fncac, FncacConfig, FncacModel, FncacReport, PipelineConfig};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::traffic::{TrafficClass, NUM_CLASSES};

/// Features beyond the per-RAT occupancies: three one-hot demand entries,
/// utilization and cost.
pub const EXTRA_FEATURES: usize = NUM_CLASSES + 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatDescriptor {
    pub id: u32,
    pub capacity: u32,
    pub current_load: u32,
    pub cost_per_channel: f64,
}

impl RatDescriptor {
    pub fn occupancy(&self) -> f64 {
        if self.capacity == 0 {
            1.0
        } else {
            f64::from(self.current_load) / f64::from(self.capacity)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkEnvironment {
    pub rats: Vec<RatDescriptor>,
}

/// Relative channel shares and per-channel costs of the default three RATs.
const DEFAULT_SHARES: [u32; 3] = [1, 1, 1];
const DEFAULT_COSTS: [f64; 3] = [1.0, 0.4, 0.6];

/// Splits `total` into parts proportional to `weights` (largest remainder,
/// ties to the lower index).
fn split_proportional(total: u32, weights: &[u32]) -> Vec<u32> {
    let sum: u64 = weights.iter().map(|&w| u64::from(w)).sum();
    if sum == 0 {
        return vec![0; weights.len()];
    }
    let mut parts: Vec<u32> = weights.iter().map(|&w| (u64::from(total) * u64::from(w) / sum) as u32).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(u64::from(total) * u64::from(weights[i]) % sum));
    let mut left = total - parts.iter().sum::<u32>();
    for i in order {
        if left == 0 {
            break;
        }
        parts[i] += 1;
        left -= 1;
    }
    parts
}

impl NetworkEnvironment {
    pub fn new(rats: Vec<RatDescriptor>) -> Result<Self> {
        let env = Self { rats };
        env.validate()?;
        Ok(env)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rats.is_empty() {
            return Err(invalid("network environment needs at least one RAT"));
        }
        for r in &self.rats {
            if r.current_load > r.capacity {
                return Err(invalid(format!("RAT {} load {} exceeds capacity {}", r.id, r.current_load, r.capacity)));
            }
            if !(r.cost_per_channel >= 0.0 && r.cost_per_channel.is_finite()) {
                return Err(invalid(format!("RAT {} cost must be nonnegative", r.id)));
            }
        }
        if self.max_cost() <= 0.0 {
            return Err(invalid("at least one RAT must have a positive cost"));
        }
        Ok(())
    }

    /// Three idle RATs splitting `capacity` channels evenly.
    pub fn default_for(capacity: u32) -> Self {
        Self::with_costs(capacity, &DEFAULT_SHARES, &DEFAULT_COSTS)
    }

    /// Idle RATs with capacities proportional to `shares`.
    pub fn with_costs(capacity: u32, shares: &[u32], costs: &[f64]) -> Self {
        let caps = split_proportional(capacity, shares);
        let rats = caps
            .into_iter()
            .zip(costs)
            .enumerate()
            .map(|(i, (capacity, &cost_per_channel))| RatDescriptor {
                id: i as u32 + 1,
                capacity,
                current_load: 0,
                cost_per_channel,
            })
            .collect();
        Self { rats }
    }

    pub fn capacity(&self) -> u32 {
        self.rats.iter().map(|r| r.capacity).sum()
    }

    pub fn load(&self) -> u32 {
        self.rats.iter().map(|r| r.current_load).sum()
    }

    pub fn max_cost(&self) -> f64 {
        self.rats.iter().map(|r| r.cost_per_channel).fold(0.0, f64::max)
    }

    /// Same RATs resized to a pool of `capacity` channels, idle.
    pub fn resized(&self, capacity: u32) -> Self {
        let shares: Vec<u32> = self.rats.iter().map(|r| r.capacity).collect();
        let costs: Vec<f64> = self.rats.iter().map(|r| r.cost_per_channel).collect();
        let mut env = Self::with_costs(capacity, &shares, &costs);
        for (r, old) in env.rats.iter_mut().zip(&self.rats) {
            r.id = old.id;
        }
        env
    }

    /// Spreads `occupied` channels over the RATs in proportion to their
    /// capacities.
    pub fn set_load(&mut self, occupied: u32) -> Result<()> {
        if occupied > self.capacity() {
            return Err(invalid(format!("{occupied} occupied channels exceed capacity {}", self.capacity())));
        }
        let caps: Vec<u32> = self.rats.iter().map(|r| r.capacity).collect();
        for (r, load) in self.rats.iter_mut().zip(split_proportional(occupied, &caps)) {
            r.current_load = load;
        }
        Ok(())
    }

    fn least_loaded(&self) -> &RatDescriptor {
        self.rats
            .iter()
            .min_by(|x, y| x.occupancy().total_cmp(&y.occupancy()))
            .expect("environment is non-empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn arity(rats: usize) -> usize {
        rats + EXTRA_FEATURES
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Column names in encoding order.
    pub fn names(rats: usize) -> Vec<String> {
        let mut n: Vec<String> = (1..=rats).map(|k| format!("occ{k}")).collect();
        n.extend((1..=NUM_CLASSES).map(|k| format!("type{k}")));
        n.push("utilization".into());
        n.push("cost".into());
        n
    }
}

/// Encodes a request of `class` arriving at utilization `a`.
///
/// The cost entry is `b_i · cost` of the least-loaded RAT divided by
/// `cost_normalizer`; [`cost_normalizer`] keeps it within `[0, 1]`.
pub fn extract_features(env: &NetworkEnvironment, class: &TrafficClass, a: f64) -> Result<FeatureVector> {
    env.validate()?;
    let id = usize::from(class.id);
    if !(1..=NUM_CLASSES).contains(&id) {
        return Err(invalid(format!("class id {} has no demand encoding", class.id)));
    }
    if !(a >= 0.0 && a.is_finite()) {
        return Err(invalid(format!("utilization must be finite and nonnegative, got {a}")));
    }
    let mut values: Vec<f64> = env.rats.iter().map(RatDescriptor::occupancy).collect();
    values.extend((1..=NUM_CLASSES).map(|k| if k == id { 1.0 } else { 0.0 }));
    values.push(a);
    let cost = f64::from(class.channel_demand) * env.least_loaded().cost_per_channel;
    values.push(cost / cost_normalizer(env));
    Ok(FeatureVector { values })
}

/// Largest possible request cost: the biggest per-channel cost times the
/// largest demand of the class encoding.
pub fn cost_normalizer(env: &NetworkEnvironment) -> f64 {
    env.max_cost() * NUM_CLASSES as f64
}

/// An oracle-labelled request together with the state it was made in.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: FeatureVector,
    /// Features of the arrivals just before this one, oldest first.
    pub history: Vec<FeatureVector>,
    /// 1.0 admit, 0.0 reject.
    pub label: f64,
    pub class_id: u8,
    pub demand: u32,
    pub free_channels: u32,
    pub utilization: f64,
}

impl LabeledSample {
    /// Network input sequence: the history followed by the request.
    pub fn sequence(&self) -> Vec<Vec<f64>> {
        self.history.iter().chain([&self.features]).map(|f| f.values.clone()).collect()
    }
}
