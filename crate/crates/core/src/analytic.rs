//! Recurrence-based blocking model for the equal-rate three-class cell, with
//! exact Erlang-B and multirate (Kaufman-Roberts) oracles.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CacError, Result};
use crate::exec::{self, ExecMode};
use crate::traffic::TrafficClass;

const RESCALE_ABOVE: f64 = 1e250;

/// Steady-state probabilities over occupied channels `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDistribution {
    pub probs: Vec<f64>,
    pub capacity: u32,
    /// Utilization `a` the distribution was solved for.
    pub utilization: f64,
}

impl StateDistribution {
    /// Probability of the empty system, P(0).
    pub fn p_empty(&self) -> f64 {
        self.probs[0]
    }

    pub fn p(&self, k: u32) -> f64 {
        self.probs[k as usize]
    }
}

/// How per-class blocking is read off a [`StateDistribution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ReadoutMode {
    /// Single top states: B1 = P_N, B2 = P_{N-1}, B3 = P_{N-2}.
    #[default]
    PaperFaithful,
    /// B_i = sum of P_k over states with fewer than b_i free channels.
    Cumulative,
    /// Exact multirate loss blocking (validation oracle).
    Exact,
}

impl ReadoutMode {
    pub fn label(self) -> &'static str {
        match self {
            ReadoutMode::PaperFaithful => "paper-faithful",
            ReadoutMode::Cumulative => "cumulative",
            ReadoutMode::Exact => "exact",
        }
    }
}

impl fmt::Display for ReadoutMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ReadoutMode {
    type Err = CacError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper-faithful" => Ok(ReadoutMode::PaperFaithful),
            "cumulative" => Ok(ReadoutMode::Cumulative),
            "exact" => Ok(ReadoutMode::Exact),
            other => Err(invalid(format!("unknown mode `{other}` (expected paper, cumulative or exact)"))),
        }
    }
}

/// Per-class and aggregate blocking probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockingReport {
    pub per_class: Vec<f64>,
    pub aggregate: f64,
    pub mode: ReadoutMode,
}

fn check_load(a: f64) -> Result<()> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(invalid(format!("utilization must be finite and >= 0, got {a}")));
    }
    Ok(())
}

fn check_depth(capacity: u32) -> Result<()> {
    if capacity < 3 {
        return Err(invalid(format!(
            "capacity must satisfy N >= 3 for the depth-3 recurrence, got {capacity}"
        )));
    }
    Ok(())
}

fn normalize(mut q: Vec<f64>) -> Vec<f64> {
    let total: f64 = q.iter().sum();
    for v in &mut q {
        *v /= total;
    }
    q
}

/// Solves P_k = (a/3)(P_{k-1} + P_{k-2} + P_{k-3}) from P_0 = 1 (P_k = 0 for
/// k < 0) and normalizes the result.
pub fn solve_recurrence(capacity: u32, a: f64) -> Result<StateDistribution> {
    check_depth(capacity)?;
    check_load(a)?;
    let n = capacity as usize;
    let factor = a / 3.0;
    let mut q = vec![0.0; n + 1];
    q[0] = 1.0;
    for k in 1..=n {
        let tail = (1..=3).filter(|&d| d <= k).map(|d| q[k - d]).sum::<f64>();
        q[k] = factor * tail;
        if q[k] > RESCALE_ABOVE {
            let s = q[k];
            q[..=k].iter_mut().for_each(|v| *v /= s);
        }
    }
    Ok(StateDistribution {
        probs: normalize(q),
        capacity,
        utilization: a,
    })
}

/// Overall blocking (a/3)(P_N + P_{N-1} + P_{N-2}).
pub fn aggregate_blocking(dist: &StateDistribution, a: f64) -> f64 {
    let n = dist.capacity;
    (a / 3.0) * (dist.p(n) + dist.p(n - 1) + dist.p(n - 2))
}

/// Reads per-class blocking for demands (1, 2, 3) off `dist`.
///
/// The aggregate is the overall-traffic expression in paper-faithful mode and
/// the equal-weight mean of the per-class values in cumulative mode (the three
/// classes offer equal arrival rates).
pub fn class_blocking(dist: &StateDistribution, mode: ReadoutMode) -> Result<BlockingReport> {
    check_depth(dist.capacity)?;
    let n = dist.capacity;
    let (per_class, aggregate) = match mode {
        ReadoutMode::PaperFaithful => {
            let b = vec![dist.p(n), dist.p(n - 1), dist.p(n - 2)];
            (b, aggregate_blocking(dist, dist.utilization))
        }
        ReadoutMode::Cumulative => {
            let b: Vec<f64> = (1..=3u32)
                .map(|demand| ((n - demand + 1)..=n).map(|k| dist.p(k)).sum())
                .collect();
            let mean = b.iter().sum::<f64>() / 3.0;
            (b, mean)
        }
        ReadoutMode::Exact => {
            return Err(invalid("exact blocking comes from multirate_exact, not the recurrence"));
        }
    };
    Ok(BlockingReport {
        per_class,
        aggregate,
        mode,
    })
}

/// Erlang-B blocking of `servers` channels offered `offered_load` Erlangs.
pub fn erlang_b(servers: u32, offered_load: f64) -> Result<f64> {
    if servers == 0 {
        return Err(invalid("Erlang-B needs at least one server"));
    }
    check_load(offered_load)?;
    let mut e = 1.0;
    for k in 1..=servers {
        e = offered_load * e / (f64::from(k) + offered_load * e);
    }
    Ok(e)
}

/// Unnormalized Kaufman-Roberts occupancy weights for complete sharing.
fn kaufman_roberts(capacity: u32, classes: &[TrafficClass]) -> Vec<f64> {
    let n = capacity as usize;
    let mut q = vec![0.0; n + 1];
    q[0] = 1.0;
    for k in 1..=n {
        let mut acc = 0.0;
        for c in classes {
            let b = c.channel_demand as usize;
            if b <= k {
                acc += c.utilization() * b as f64 * q[k - b];
            }
        }
        q[k] = acc / k as f64;
        if q[k] > RESCALE_ABOVE {
            let s = q[k];
            q[..=k].iter_mut().for_each(|v| *v /= s);
        }
    }
    q
}

/// Exact per-class blocking of the complete-sharing multirate loss system.
/// The aggregate is weighted by arrival rate (call-level blocking).
pub fn multirate_exact(capacity: u32, classes: &[TrafficClass]) -> Result<BlockingReport> {
    let max_demand = classes.iter().map(|c| c.channel_demand).max().unwrap_or(0);
    if classes.is_empty() || capacity < max_demand {
        return Err(invalid(format!(
            "capacity {capacity} must be at least the largest channel demand {max_demand}"
        )));
    }
    for c in classes {
        c.validate()?;
    }
    let probs = normalize(kaufman_roberts(capacity, classes));
    let per_class: Vec<f64> = classes
        .iter()
        .map(|c| {
            let first_blocked = (capacity - c.channel_demand + 1) as usize;
            probs[first_blocked..].iter().sum()
        })
        .collect();
    let total_rate: f64 = classes.iter().map(|c| c.arrival_rate).sum();
    let aggregate = if total_rate > 0.0 {
        classes.iter().zip(&per_class).map(|(c, b)| c.arrival_rate * b).sum::<f64>() / total_rate
    } else {
        0.0
    };
    Ok(BlockingReport {
        per_class,
        aggregate,
        mode: ReadoutMode::Exact,
    })
}

/// One row of an analytic sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub utilization: f64,
    pub report: BlockingReport,
}

/// Evaluates the recurrence model at every grid point, in grid order.
pub fn sweep_analytic(grid: &[f64], capacity: u32, mode: ReadoutMode, exec: ExecMode) -> Result<Vec<SweepRow>> {
    exec::map_indexed(exec, grid.len(), |i| {
        let a = grid[i];
        let dist = solve_recurrence(capacity, a)?;
        Ok(SweepRow {
            utilization: a,
            report: class_blocking(&dist, mode)?,
        })
    })
    .into_iter()
    .collect()
}

pub const ANALYTIC_CSV_HEADER: &str = "utilization,mode,b_type1,b_type2,b_type3,aggregate";

pub fn write_analytic_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{ANALYTIC_CSV_HEADER}")?;
    for row in rows {
        let r = &row.report;
        write!(out, "{},{}", row.utilization, r.mode)?;
        for b in &r.per_class {
            write!(out, ",{b:?}")?;
        }
        writeln!(out, ",{:?}", r.aggregate)?;
    }
    Ok(())
}
