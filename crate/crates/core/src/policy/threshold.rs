//! Free-channel threshold admission.
//!
//! With `f` free channels and thresholds `A1 < A2 < A3`: at `f >= A3` every
//! class is eligible, at `A2 <= f < A3` types 1 and 2, at `A1 <= f < A2` only
//! type 1, and below `A1` nothing. An eligible call still needs `f >= b_i`.

use serde::{Deserialize, Serialize};

use super::{AdmissionDecision, AdmissionPolicy, RejectReason, SystemState};
use crate::error::{invalid, CacError, Result};
use crate::traffic::{Scenario, TrafficClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ThresholdSet {
    pub a1: u32,
    pub a2: u32,
    pub a3: u32,
}

impl ThresholdSet {
    pub fn new(a1: u32, a2: u32, a3: u32) -> Result<Self> {
        let t = Self { a1, a2, a3 };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0 < self.a1 && self.a1 < self.a2 && self.a2 < self.a3) {
            return Err(invalid(format!(
                "thresholds must satisfy 0 < A1 < A2 < A3, got ({}, {}, {})",
                self.a1, self.a2, self.a3
            )));
        }
        Ok(())
    }

    pub fn validate_for(&self, capacity: u32) -> Result<()> {
        self.validate()?;
        if self.a3 > capacity {
            return Err(invalid(format!("A3 = {} exceeds capacity {capacity}", self.a3)));
        }
        Ok(())
    }

    /// Smallest free-channel count at which class `id` is eligible.
    pub fn bound_for(&self, id: u8) -> u32 {
        match id {
            1 => self.a1,
            2 => self.a2,
            _ => self.a3,
        }
    }

    /// Every valid set with `A3 <= max`, in lexicographic order.
    pub fn enumerate(max: u32) -> Vec<ThresholdSet> {
        let mut out = Vec::new();
        for a1 in 1..=max {
            for a2 in (a1 + 1)..=max {
                for a3 in (a2 + 1)..=max {
                    out.push(ThresholdSet { a1, a2, a3 });
                }
            }
        }
        out
    }
}

impl std::str::FromStr for ThresholdSet {
    type Err = CacError;

    /// Parses `A1,A2,A3`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<u32> = s
            .split(',')
            .map(|p| p.trim().parse::<u32>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| invalid(format!("bad threshold list `{s}`: {e}")))?;
        match parts.as_slice() {
            [a1, a2, a3] => ThresholdSet::new(*a1, *a2, *a3),
            _ => Err(invalid(format!("expected three thresholds A1,A2,A3, got `{s}`"))),
        }
    }
}

impl std::fmt::Display for ThresholdSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.a1, self.a2, self.a3)
    }
}

pub fn decide_threshold(state: &SystemState, class: &TrafficClass, t: &ThresholdSet) -> AdmissionDecision {
    let free = state.free_channels();
    if free < t.bound_for(class.id) {
        AdmissionDecision::Reject(RejectReason::ThresholdRegion)
    } else if free < class.channel_demand {
        AdmissionDecision::Reject(RejectReason::Capacity)
    } else {
        AdmissionDecision::Admit
    }
}

/// Threshold sets tuned per utilization level. A run uses the set of the
/// level closest to the scenario's aggregate utilization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSchedule {
    pub levels: Vec<(f64, ThresholdSet)>,
}

impl ThresholdSchedule {
    pub fn constant(t: ThresholdSet) -> Self {
        Self { levels: vec![(0.0, t)] }
    }

    pub fn for_utilization(&self, a: f64) -> ThresholdSet {
        self.levels
            .iter()
            .min_by(|x, y| (x.0 - a).abs().total_cmp(&(y.0 - a).abs()))
            .map(|&(_, t)| t)
            .expect("schedule has at least one level")
    }
}

#[derive(Debug, Clone)]
pub struct ThresholdPolicy {
    schedule: ThresholdSchedule,
    active: ThresholdSet,
}

impl ThresholdPolicy {
    pub fn new(t: ThresholdSet) -> Self {
        Self::scheduled(ThresholdSchedule::constant(t))
    }

    pub fn scheduled(schedule: ThresholdSchedule) -> Self {
        assert!(!schedule.levels.is_empty(), "threshold schedule must not be empty");
        let active = schedule.levels[0].1;
        Self { schedule, active }
    }

    /// Selects the set for utilization `a` without starting a run.
    pub fn set_utilization(&mut self, a: f64) {
        self.active = self.schedule.for_utilization(a);
    }

    pub fn active(&self) -> ThresholdSet {
        self.active
    }
}

impl AdmissionPolicy for ThresholdPolicy {
    fn name(&self) -> &str {
        "threshold"
    }

    fn begin_run(&mut self, scenario: &Scenario) {
        self.set_utilization(scenario.aggregate_utilization);
    }

    fn decide(&mut self, state: &SystemState, class: &TrafficClass) -> AdmissionDecision {
        decide_threshold(state, class, &self.active)
    }
}
