//! Seeded discrete-event simulation of the multi-class loss cell.
//!
//! Each traffic class owns two random streams (interarrival and holding
//! times) derived from the replication seed. A holding time is drawn for
//! every arrival, admitted or not, so the offered traffic is identical across
//! policies for a given seed (common random numbers).

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::io::Write;

use crate::error::{invalid, CacError, Result};
use crate::policy::{AdmissionDecision, AdmissionPolicy, SystemState};
use crate::rng::{self, streams, SimRng};
use crate::traffic::{sample_holding, sample_interarrival, Scenario};

mod metrics;
mod validate;

pub use metrics::{ClassMetrics, Metrics, RunCounts, Z_95};
pub use validate::{validate_against_exact, ExactComparison};

use crate::exec::{self, ExecMode};

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Stop after this many arrivals (all classes together).
    pub total_arrivals: u64,
    /// Leading arrivals excluded from the metrics.
    pub warmup_arrivals: u64,
    pub seed: u64,
    pub replications: usize,
    pub exec: ExecMode,
}

impl SimConfig {
    /// Config with the default 10% warmup.
    pub fn new(total_arrivals: u64, seed: u64, replications: usize) -> Self {
        Self {
            total_arrivals,
            warmup_arrivals: total_arrivals / 10,
            seed,
            replications,
            exec: ExecMode::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.warmup_arrivals >= self.total_arrivals {
            return Err(invalid(format!(
                "warmup ({}) must be smaller than total arrivals ({})",
                self.warmup_arrivals, self.total_arrivals
            )));
        }
        if self.replications == 0 {
            return Err(invalid("at least one replication is required"));
        }
        Ok(())
    }

    /// Seed of replication `index`.
    pub fn replication_seed(&self, index: usize) -> u64 {
        rng::derive_seed(self.seed, index as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Arrival { class: usize },
    Departure { class: usize, call: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    seq: u64,
}

impl Event {
    fn rank(&self) -> u8 {
        match self.kind {
            EventKind::Departure { .. } => 0,
            EventKind::Arrival { .. } => 1,
        }
    }
}

impl Eq for Event {}

impl Ord for Event {
    /// Time, then departures before arrivals, then insertion order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.time
            .total_cmp(&other.time)
            .then(self.rank().cmp(&other.rank()))
            .then(self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// What the event loop reports to an observer after handling an event.
#[derive(Debug)]
pub struct Observation<'a> {
    pub time: f64,
    pub kind: EventKind,
    pub free_before: u32,
    /// `None` for departures.
    pub decision: Option<AdmissionDecision>,
    /// Arrival counter including this event (arrivals only).
    pub arrival_index: u64,
    /// State before the event was applied.
    pub state_before: &'a SystemState,
    pub state_after: &'a SystemState,
}

struct Streams {
    arrivals: Vec<SimRng>,
    holding: Vec<SimRng>,
}

impl Streams {
    fn new(seed: u64, classes: usize) -> Self {
        Self {
            arrivals: (0..classes).map(|i| rng::stream(seed, streams::arrivals(i))).collect(),
            holding: (0..classes).map(|i| rng::stream(seed, streams::holding(i))).collect(),
        }
    }
}

/// Runs one replication seeded with `seed`, calling `observe` after every
/// processed event.
pub fn run_observed<P, F>(scenario: &Scenario, policy: &mut P, config: &SimConfig, seed: u64, mut observe: F) -> Result<RunCounts>
where
    P: AdmissionPolicy + ?Sized,
    F: FnMut(&Observation<'_>),
{
    scenario.validate()?;
    config.validate()?;
    let k = scenario.classes.len();
    let demands: Vec<u32> = scenario.classes.iter().map(|c| c.channel_demand).collect();
    let mut state = SystemState::empty(scenario.capacity, demands);
    let mut streams = Streams::new(seed, k);
    let mut queue: BinaryHeap<Reverse<Event>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |queue: &mut BinaryHeap<Reverse<Event>>, time: f64, kind: EventKind| {
        queue.push(Reverse(Event { time, kind, seq }));
        seq += 1;
    };
    for (i, c) in scenario.classes.iter().enumerate() {
        let t = sample_interarrival(c, &mut streams.arrivals[i]);
        if t.is_finite() {
            push(&mut queue, t, EventKind::Arrival { class: i });
        }
    }
    policy.begin_run(scenario);

    let mut counts = RunCounts::new(k);
    let mut arrivals = 0u64;
    let mut next_call = 0u64;
    let mut last_time = 0.0;
    while let Some(Reverse(ev)) = queue.pop() {
        debug_assert!(ev.time >= last_time);
        last_time = ev.time;
        let before = state.clone();
        match ev.kind {
            EventKind::Departure { class, .. } => {
                state.release(class)?;
                observe(&Observation {
                    time: ev.time,
                    kind: ev.kind,
                    free_before: before.free_channels(),
                    decision: None,
                    arrival_index: arrivals,
                    state_before: &before,
                    state_after: &state,
                });
            }
            EventKind::Arrival { class } => {
                arrivals += 1;
                let c = &scenario.classes[class];
                let hold = sample_holding(c, &mut streams.holding[class]);
                let decision = policy.decide(&state, c);
                if decision.is_admit() {
                    if state.free_channels() < c.channel_demand {
                        return Err(CacError::PolicyViolation(format!(
                            "policy `{}` admitted a {}-channel call with {} free channels at t = {}",
                            policy.name(),
                            c.channel_demand,
                            state.free_channels(),
                            ev.time
                        )));
                    }
                    state.admit(class)?;
                    let call = next_call;
                    next_call += 1;
                    push(&mut queue, ev.time + hold, EventKind::Departure { class, call });
                }
                if arrivals > config.warmup_arrivals {
                    counts.record(class, decision.is_admit());
                }
                observe(&Observation {
                    time: ev.time,
                    kind: ev.kind,
                    free_before: before.free_channels(),
                    decision: Some(decision),
                    arrival_index: arrivals,
                    state_before: &before,
                    state_after: &state,
                });
                if arrivals >= config.total_arrivals {
                    break;
                }
                let next = ev.time + sample_interarrival(c, &mut streams.arrivals[class]);
                push(&mut queue, next, EventKind::Arrival { class });
            }
        }
    }
    Ok(counts)
}

/// One replication seeded directly with `config.seed`.
pub fn run<P: AdmissionPolicy + ?Sized>(scenario: &Scenario, policy: &mut P, config: &SimConfig) -> Result<Metrics> {
    let counts = run_observed(scenario, policy, config, config.seed, |_| {})?;
    Ok(Metrics::from_runs(&[counts]))
}

/// Like [`run`], writing one CSV line per event:
/// `time,kind,class,free_before,decision`.
pub fn run_traced<P, W>(scenario: &Scenario, policy: &mut P, config: &SimConfig, mut out: W) -> Result<Metrics>
where
    P: AdmissionPolicy + ?Sized,
    W: Write,
{
    let mut io_err = None;
    writeln!(out, "time,kind,class,free_before,decision").map_err(|e| CacError::Io(e.to_string()))?;
    let counts = run_observed(scenario, policy, config, config.seed, |o| {
        if io_err.is_some() {
            return;
        }
        let (kind, class) = match o.kind {
            EventKind::Arrival { class } => ("arrival", class),
            EventKind::Departure { class, .. } => ("departure", class),
        };
        let decision = o.decision.map(|d| d.to_string()).unwrap_or_else(|| "-".into());
        let label = scenario.classes[class].type_label();
        if let Err(e) = writeln!(out, "{},{kind},{label},{},{decision}", o.time, o.free_before) {
            io_err = Some(e);
        }
    })?;
    if let Some(e) = io_err {
        return Err(CacError::Io(format!("trace write failed: {e}")));
    }
    Ok(Metrics::from_runs(&[counts]))
}

/// Independent replications with seeds derived from `(config.seed, index)`.
/// Each replication gets its own clone of `policy`.
pub fn replicate<P>(scenario: &Scenario, policy: &P, config: &SimConfig) -> Result<Metrics>
where
    P: AdmissionPolicy + Clone + Send + Sync,
{
    config.validate()?;
    let runs = exec::map_indexed(config.exec, config.replications, |r| {
        let mut p = policy.clone();
        run_observed(scenario, &mut p, config, config.replication_seed(r), |_| {})
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(Metrics::from_runs(&runs))
}

#[cfg(test)]
mod tests;
