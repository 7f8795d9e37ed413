//! Admission policies: capacity-only, free-channel thresholds, and fuzzy
//! inference. The recurrent-RBF controller lives in [`crate::fncac`].

use std::fmt;

use crate::error::{invalid, Result};
use crate::fncac::FncacPolicy;
use crate::traffic::{Scenario, TrafficClass};

pub mod fuzzy;
pub mod threshold;

pub use fuzzy::{decide_fuzzy, fuzzy_infer, FuzzyPolicy, FuzzySet, FuzzySystem};
pub use threshold::{decide_threshold, ThresholdPolicy, ThresholdSchedule, ThresholdSet};

/// Live occupancy of the cell as seen by a policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemState {
    capacity: u32,
    demands: Vec<u32>,
    occupied: Vec<u32>,
}

impl SystemState {
    pub fn new(capacity: u32, demands: Vec<u32>, occupied: Vec<u32>) -> Result<Self> {
        if demands.len() != occupied.len() {
            return Err(invalid("one occupancy count per class is required"));
        }
        let used: u64 = demands.iter().zip(&occupied).map(|(&b, &n)| u64::from(b) * u64::from(n)).sum();
        if used > u64::from(capacity) {
            return Err(invalid(format!("occupancy {used} exceeds capacity {capacity}")));
        }
        Ok(Self {
            capacity,
            demands,
            occupied,
        })
    }

    /// Empty cell for the given class demands.
    pub fn empty(capacity: u32, demands: Vec<u32>) -> Self {
        let occupied = vec![0; demands.len()];
        Self {
            capacity,
            demands,
            occupied,
        }
    }

    /// Three-class (1, 2, 3) state with `free` channels left, all of the used
    /// capacity held by type-1 calls.
    pub fn with_free(capacity: u32, free: u32) -> Result<Self> {
        if free > capacity {
            return Err(invalid(format!("free channels {free} exceed capacity {capacity}")));
        }
        Self::new(capacity, vec![1, 2, 3], vec![capacity - free, 0, 0])
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn occupied_per_class(&self) -> &[u32] {
        &self.occupied
    }

    pub fn demands(&self) -> &[u32] {
        &self.demands
    }

    pub fn occupied_channels(&self) -> u32 {
        self.demands.iter().zip(&self.occupied).map(|(b, n)| b * n).sum()
    }

    pub fn free_channels(&self) -> u32 {
        self.capacity - self.occupied_channels()
    }

    pub fn occupancy_ratio(&self) -> f64 {
        f64::from(self.occupied_channels()) / f64::from(self.capacity)
    }

    pub fn active_calls(&self) -> u32 {
        self.occupied.iter().sum()
    }

    /// Records an admitted call of class index `i`.
    pub fn admit(&mut self, i: usize) -> Result<()> {
        if self.free_channels() < self.demands[i] {
            return Err(invalid(format!(
                "cannot place a {}-channel call with {} free channels",
                self.demands[i],
                self.free_channels()
            )));
        }
        self.occupied[i] += 1;
        Ok(())
    }

    /// Releases one call of class index `i`.
    pub fn release(&mut self, i: usize) -> Result<()> {
        if self.occupied[i] == 0 {
            return Err(invalid(format!("no active call of class index {i} to release")));
        }
        self.occupied[i] -= 1;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    Capacity,
    ThresholdRegion,
    PolicyScore,
}

impl RejectReason {
    pub fn label(self) -> &'static str {
        match self {
            RejectReason::Capacity => "capacity",
            RejectReason::ThresholdRegion => "threshold-region",
            RejectReason::PolicyScore => "policy-score",
        }
    }
}

/// Outcome of one admission request. A rejection always names its reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmissionDecision {
    Admit,
    Reject(RejectReason),
}

impl AdmissionDecision {
    pub fn is_admit(self) -> bool {
        matches!(self, AdmissionDecision::Admit)
    }

    pub fn reason(self) -> Option<RejectReason> {
        match self {
            AdmissionDecision::Admit => None,
            AdmissionDecision::Reject(r) => Some(r),
        }
    }
}

impl fmt::Display for AdmissionDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissionDecision::Admit => f.write_str("admit"),
            AdmissionDecision::Reject(r) => write!(f, "reject:{}", r.label()),
        }
    }
}

/// An admission controller consulted at every arrival.
///
/// `decide` takes `&mut self` because some controllers carry state across
/// arrivals. Implementations must never admit a call that does not fit.
pub trait AdmissionPolicy {
    fn name(&self) -> &str;

    /// Called once before a simulation run starts.
    fn begin_run(&mut self, _scenario: &Scenario) {}

    fn decide(&mut self, state: &SystemState, class: &TrafficClass) -> AdmissionDecision;
}

impl<P: AdmissionPolicy + ?Sized> AdmissionPolicy for Box<P> {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn begin_run(&mut self, scenario: &Scenario) {
        (**self).begin_run(scenario)
    }

    fn decide(&mut self, state: &SystemState, class: &TrafficClass) -> AdmissionDecision {
        (**self).decide(state, class)
    }
}

/// Capacity-only admission (complete sharing).
pub fn decide_conventional(state: &SystemState, class: &TrafficClass) -> AdmissionDecision {
    if state.free_channels() >= class.channel_demand {
        AdmissionDecision::Admit
    } else {
        AdmissionDecision::Reject(RejectReason::Capacity)
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ConventionalPolicy;

impl AdmissionPolicy for ConventionalPolicy {
    fn name(&self) -> &str {
        "conventional"
    }

    fn decide(&mut self, state: &SystemState, class: &TrafficClass) -> AdmissionDecision {
        decide_conventional(state, class)
    }
}

/// Any of the built-in controllers, for callers that pick one at run time.
#[derive(Debug, Clone)]
pub enum Policy {
    Conventional(ConventionalPolicy),
    Threshold(ThresholdPolicy),
    Fuzzy(FuzzyPolicy),
    Fncac(Box<FncacPolicy>),
}

impl AdmissionPolicy for Policy {
    fn name(&self) -> &str {
        match self {
            Policy::Conventional(p) => p.name(),
            Policy::Threshold(p) => p.name(),
            Policy::Fuzzy(p) => p.name(),
            Policy::Fncac(p) => p.name(),
        }
    }

    fn begin_run(&mut self, scenario: &Scenario) {
        match self {
            Policy::Conventional(p) => p.begin_run(scenario),
            Policy::Threshold(p) => p.begin_run(scenario),
            Policy::Fuzzy(p) => p.begin_run(scenario),
            Policy::Fncac(p) => p.begin_run(scenario),
        }
    }

    fn decide(&mut self, state: &SystemState, class: &TrafficClass) -> AdmissionDecision {
        match self {
            Policy::Conventional(p) => p.decide(state, class),
            Policy::Threshold(p) => p.decide(state, class),
            Policy::Fuzzy(p) => p.decide(state, class),
            Policy::Fncac(p) => p.decide(state, class),
        }
    }
}

#[cfg(test)]
pub(crate) mod test_support {
    use crate::traffic::TrafficClass;

    pub fn class(id: u8) -> TrafficClass {
        let names = ["conversational", "interactive", "background"];
        TrafficClass::new(id, names[id as usize - 1], u32::from(id), 1.0, 1.0).unwrap()
    }
}
