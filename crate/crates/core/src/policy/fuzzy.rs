//! Mamdani fuzzy admission control.
//!
//! Inputs are the occupancy ratio of the cell and the channel demand of the
//! request. Rule strength is the min of the antecedent memberships, the
//! clipped consequents are max-aggregated, and the admit score is the centroid
//! of the aggregate sampled on a fixed 1001-point grid over [0, 1].
//!
//! Default rule base (artifact-designed; the output sets are triangles of
//! half-width 0.2 centred at 0.1, 0.5 and 0.9):
//!
//! | occupancy \ demand | Light (1)      | Medium (2)     | Heavy (3)      |
//! |--------------------|----------------|----------------|----------------|
//! | Low    (0, 0.0, .5)| StronglyAdmit  | StronglyAdmit  | StronglyAdmit  |
//! | Medium (0, 0.5, 1) | StronglyAdmit  | StronglyAdmit  | StronglyAdmit  |
//! | High (.92, 1, 1.08)| StronglyAdmit  | Weak           | Reject         |

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{AdmissionDecision, AdmissionPolicy, RejectReason, SystemState};
use crate::error::{invalid, CacError, Result};
use crate::traffic::TrafficClass;

pub const DEFUZZ_GRID_POINTS: usize = 1001;
pub const ADMIT_SCORE: f64 = 0.5;

/// Triangular membership function with feet `left`, `right` and apex `peak`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySet {
    pub name: String,
    pub left: f64,
    pub peak: f64,
    pub right: f64,
}

impl FuzzySet {
    pub fn triangle(name: &str, left: f64, peak: f64, right: f64) -> Self {
        Self {
            name: name.to_string(),
            left,
            peak,
            right,
        }
    }

    pub fn membership(&self, x: f64) -> f64 {
        if x == self.peak {
            1.0
        } else if x > self.left && x < self.peak {
            (x - self.left) / (self.peak - self.left)
        } else if x > self.peak && x < self.right {
            (self.right - x) / (self.right - self.peak)
        } else {
            0.0
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = [self.left, self.peak, self.right].iter().all(|v| v.is_finite())
            && self.left <= self.peak
            && self.peak <= self.right
            && self.left < self.right;
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("fuzzy set `{}` is not a valid triangle", self.name)))
        }
    }
}

/// Crisp demand label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandSet {
    pub name: String,
    pub demand: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyRule {
    pub occupancy: String,
    pub demand: String,
    pub output: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzySystem {
    pub occupancy_sets: Vec<FuzzySet>,
    pub demand_sets: Vec<DemandSet>,
    pub output_sets: Vec<FuzzySet>,
    pub rules: Vec<FuzzyRule>,
    #[serde(skip)]
    compiled: Vec<(usize, usize, usize)>,
}

impl Default for FuzzySystem {
    fn default() -> Self {
        let occupancy_sets = vec![
            FuzzySet::triangle("Low", -0.5, 0.0, 0.5),
            FuzzySet::triangle("Medium", 0.0, 0.5, 1.0),
            FuzzySet::triangle("High", 0.92, 1.0, 1.08),
        ];
        let demand_sets = [("Light", 1), ("Medium", 2), ("Heavy", 3)]
            .iter()
            .map(|&(name, demand)| DemandSet {
                name: name.to_string(),
                demand,
            })
            .collect();
        let output_sets = vec![
            FuzzySet::triangle("Reject", -0.1, 0.1, 0.3),
            FuzzySet::triangle("Weak", 0.3, 0.5, 0.7),
            FuzzySet::triangle("StronglyAdmit", 0.7, 0.9, 1.1),
        ];
        let table = [
            ("Low", ["StronglyAdmit", "StronglyAdmit", "StronglyAdmit"]),
            ("Medium", ["StronglyAdmit", "StronglyAdmit", "StronglyAdmit"]),
            ("High", ["StronglyAdmit", "Weak", "Reject"]),
        ];
        let demands = ["Light", "Medium", "Heavy"];
        let rules = table
            .iter()
            .flat_map(|(occ, outs)| {
                demands.iter().zip(outs).map(move |(d, o)| FuzzyRule {
                    occupancy: occ.to_string(),
                    demand: d.to_string(),
                    output: o.to_string(),
                })
            })
            .collect();
        FuzzySystem::new(occupancy_sets, demand_sets, output_sets, rules).expect("default rule base is valid")
    }
}

fn index_of<'a>(names: impl Iterator<Item = &'a str>, wanted: &str, what: &str) -> Result<usize> {
    let mut names = names;
    names
        .position(|n| n == wanted)
        .ok_or_else(|| invalid(format!("rule refers to unknown {what} set `{wanted}`")))
}

impl FuzzySystem {
    pub fn new(
        occupancy_sets: Vec<FuzzySet>,
        demand_sets: Vec<DemandSet>,
        output_sets: Vec<FuzzySet>,
        rules: Vec<FuzzyRule>,
    ) -> Result<Self> {
        let mut sys = Self {
            occupancy_sets,
            demand_sets,
            output_sets,
            rules,
            compiled: Vec::new(),
        };
        sys.compile()?;
        Ok(sys)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut sys: FuzzySystem = toml::from_str(text).map_err(|e| CacError::Config(e.to_string()))?;
        sys.compile()?;
        Ok(sys)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("fuzzy system is representable as TOML")
    }

    /// Validates the sets and rule base and resolves rule names to indices.
    fn compile(&mut self) -> Result<()> {
        if self.occupancy_sets.is_empty() || self.demand_sets.is_empty() || self.output_sets.is_empty() {
            return Err(invalid("fuzzy system needs occupancy, demand and output sets"));
        }
        for s in self.occupancy_sets.iter().chain(&self.output_sets) {
            s.validate()?;
        }
        for i in 0..DEFUZZ_GRID_POINTS {
            let x = grid_point(i);
            if self.occupancy_sets.iter().all(|s| s.membership(x) <= 0.0) {
                return Err(invalid(format!("occupancy {x} is not covered by any fuzzy set")));
            }
        }
        for demand in 1..=3 {
            if !self.demand_sets.iter().any(|d| d.demand == demand) {
                return Err(invalid(format!("demand {demand} has no demand set")));
            }
        }
        if self.rules.is_empty() {
            return Err(invalid("rule base is empty"));
        }
        let mut compiled = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            compiled.push((
                index_of(self.occupancy_sets.iter().map(|s| s.name.as_str()), &r.occupancy, "occupancy")?,
                index_of(self.demand_sets.iter().map(|s| s.name.as_str()), &r.demand, "demand")?,
                index_of(self.output_sets.iter().map(|s| s.name.as_str()), &r.output, "output")?,
            ));
        }
        for o in 0..self.occupancy_sets.len() {
            for d in 0..self.demand_sets.len() {
                if !compiled.iter().any(|&(ro, rd, _)| ro == o && rd == d) {
                    return Err(invalid(format!(
                        "rule base is not total: no rule for ({}, {})",
                        self.occupancy_sets[o].name, self.demand_sets[d].name
                    )));
                }
            }
        }
        self.compiled = compiled;
        Ok(())
    }

    /// Human-readable listing of the memberships and rule table.
    pub fn describe(&self) -> String {
        let mut out = String::new();
        let tri = |out: &mut String, title: &str, sets: &[FuzzySet]| {
            let _ = writeln!(out, "{title}");
            for s in sets {
                let _ = writeln!(out, "  {:<14} triangle({:.2}, {:.2}, {:.2})", s.name, s.left, s.peak, s.right);
            }
        };
        tri(&mut out, "occupancy ratio sets:", &self.occupancy_sets);
        let _ = writeln!(out, "demand sets:");
        for d in &self.demand_sets {
            let _ = writeln!(out, "  {:<14} demand = {}", d.name, d.demand);
        }
        tri(&mut out, "admit-score sets:", &self.output_sets);
        let _ = writeln!(out, "rules:");
        let _ = write!(out, "  {:<12}", "occ\\demand");
        for d in &self.demand_sets {
            let _ = write!(out, " {:<14}", d.name);
        }
        let _ = writeln!(out);
        for (oi, o) in self.occupancy_sets.iter().enumerate() {
            let _ = write!(out, "  {:<12}", o.name);
            for di in 0..self.demand_sets.len() {
                let outs: Vec<&str> = self
                    .compiled
                    .iter()
                    .filter(|&&(ro, rd, _)| ro == oi && rd == di)
                    .map(|&(_, _, k)| self.output_sets[k].name.as_str())
                    .collect();
                let _ = write!(out, " {:<14}", outs.join("|"));
            }
            let _ = writeln!(out);
        }
        out
    }
}

fn grid_point(i: usize) -> f64 {
    i as f64 / (DEFUZZ_GRID_POINTS - 1) as f64
}

/// Admit score in [0, 1] for a request of `demand` channels at the given
/// occupancy ratio.
pub fn fuzzy_infer(sys: &FuzzySystem, occupancy_ratio: f64, demand: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&occupancy_ratio) {
        return Err(invalid(format!("occupancy ratio {occupancy_ratio} outside [0, 1]")));
    }
    if !(1..=3).contains(&demand) {
        return Err(invalid(format!("demand {demand} outside {{1, 2, 3}}")));
    }
    let strengths: Vec<(f64, usize)> = sys
        .compiled
        .iter()
        .filter(|&&(_, d, _)| sys.demand_sets[d].demand == demand)
        .map(|&(o, _, k)| (sys.occupancy_sets[o].membership(occupancy_ratio), k))
        .filter(|&(w, _)| w > 0.0)
        .collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..DEFUZZ_GRID_POINTS {
        let y = grid_point(i);
        let m = strengths
            .iter()
            .map(|&(w, k)| w.min(sys.output_sets[k].membership(y)))
            .fold(0.0, f64::max);
        num += y * m;
        den += m;
    }
    Ok(if den > 0.0 { num / den } else { 0.0 })
}

/// Admits when the fuzzy score reaches 0.5 and the call fits.
pub fn decide_fuzzy(state: &SystemState, class: &TrafficClass, sys: &FuzzySystem) -> AdmissionDecision {
    if state.free_channels() < class.channel_demand {
        return AdmissionDecision::Reject(RejectReason::Capacity);
    }
    let demand = class.channel_demand.clamp(1, 3);
    match fuzzy_infer(sys, state.occupancy_ratio(), demand) {
        Ok(score) => score_decision(score, state, class),
        Err(_) => AdmissionDecision::Reject(RejectReason::PolicyScore),
    }
}

/// Applies the 0.5 score threshold (ties admit) under the capacity guard.
pub fn score_decision(score: f64, state: &SystemState, class: &TrafficClass) -> AdmissionDecision {
    if state.free_channels() < class.channel_demand {
        AdmissionDecision::Reject(RejectReason::Capacity)
    } else if score >= ADMIT_SCORE {
        AdmissionDecision::Admit
    } else {
        AdmissionDecision::Reject(RejectReason::PolicyScore)
    }
}

#[derive(Debug, Clone, Default)]
pub struct FuzzyPolicy {
    pub system: FuzzySystem,
}

impl FuzzyPolicy {
    pub fn new(system: FuzzySystem) -> Self {
        Self { system }
    }
}

impl AdmissionPolicy for FuzzyPolicy {
    fn name(&self) -> &str {
        "fuzzy"
    }

    fn decide(&mut self, state: &SystemState, class: &TrafficClass) -> AdmissionDecision {
        decide_fuzzy(state, class, &self.system)
    }
}
