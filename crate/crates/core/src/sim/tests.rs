use super::*;
use crate::analytic::erlang_b;
use crate::policy::{ConventionalPolicy, FuzzyPolicy, RejectReason, ThresholdPolicy, ThresholdSet};
use crate::traffic::{build_equal_rate_scenario, LoadModel, TrafficClass};

fn single_class(rho: f64, capacity: u32) -> Scenario {
    let c = TrafficClass::new(1, "conversational", 1, rho, 1.0).unwrap();
    Scenario::new(capacity, rho, vec![c]).unwrap()
}

#[test]
fn zero_load_offers_nothing() {
    let s = build_equal_rate_scenario(0.0, 10).unwrap();
    let m = run(&s, &mut ConventionalPolicy, &SimConfig::new(1000, 1, 1)).unwrap();
    for c in &m.per_class {
        assert_eq!((c.offered, c.blocked), (0, 0));
    }
}

#[test]
fn single_class_matches_erlang_b() {
    let s = single_class(10.0, 20);
    let m = run(&s, &mut ConventionalPolicy, &SimConfig::new(1_000_000, 2024, 1)).unwrap();
    let exact = erlang_b(20, 10.0).unwrap();
    assert!((m.per_class[0].blocking - exact).abs() < 0.005, "{} vs {exact}", m.per_class[0].blocking);
}

#[test]
fn identical_seed_identical_metrics() {
    let s = Scenario::at_load(0.7, 30, LoadModel::PerChannel).unwrap();
    let cfg = SimConfig::new(20_000, 77, 1);
    assert_eq!(
        run(&s, &mut ConventionalPolicy, &cfg).unwrap(),
        run(&s, &mut ConventionalPolicy, &cfg).unwrap()
    );
    let mut rep = SimConfig::new(5_000, 77, 4);
    let a = replicate(&s, &ConventionalPolicy, &rep).unwrap();
    rep.exec = ExecMode::Sequential;
    assert_eq!(a, replicate(&s, &ConventionalPolicy, &rep).unwrap());
}

#[test]
fn one_replication_has_flagged_zero_half_width() {
    let s = Scenario::at_load(0.7, 30, LoadModel::PerChannel).unwrap();
    let m = replicate(&s, &ConventionalPolicy, &SimConfig::new(5_000, 3, 1)).unwrap();
    assert!(m.half_width_unavailable);
    assert!(m.per_class.iter().all(|c| c.half_width == 0.0));
    assert_eq!(m.aggregate.half_width, 0.0);
}

#[test]
fn half_width_shrinks_with_root_k() {
    let s = Scenario::at_load(0.6, 30, LoadModel::PerChannel).unwrap();
    let small = replicate(&s, &ConventionalPolicy, &SimConfig::new(20_000, 10, 20)).unwrap();
    let large = replicate(&s, &ConventionalPolicy, &SimConfig::new(20_000, 10, 80)).unwrap();
    let ratio = small.aggregate.half_width / large.aggregate.half_width;
    assert!((ratio / 2.0 - 1.0).abs() < 0.3, "ratio {ratio}");
}

#[test]
fn replication_seeds_are_distinct_across_masters() {
    let a = SimConfig::new(100, 1, 50);
    let b = SimConfig::new(100, 2, 50);
    let mut seen = std::collections::HashSet::new();
    for r in 0..50 {
        assert!(seen.insert(a.replication_seed(r)));
        assert!(seen.insert(b.replication_seed(r)));
    }
}

#[test]
fn bookkeeping_invariants_hold_at_every_event() {
    let s = Scenario::at_load(0.9, 20, LoadModel::PerChannel).unwrap();
    let cfg = SimConfig::new(30_000, 5, 1);
    let mut last = 0.0;
    let mut admits = 0u64;
    let mut departures = 0u64;
    let mut arrivals = 0u64;
    let mut policy = ThresholdPolicy::new(ThresholdSet::new(1, 3, 6).unwrap());
    run_observed(&s, &mut policy, &cfg, 5, |o| {
        assert!(o.time >= last);
        last = o.time;
        assert!(o.state_after.occupied_channels() <= s.capacity);
        let before = o.state_before.free_channels();
        let after = o.state_after.free_channels();
        match o.kind {
            EventKind::Arrival { class } => {
                arrivals += 1;
                assert_eq!(o.arrival_index, arrivals);
                if o.decision.unwrap().is_admit() {
                    admits += 1;
                    assert_eq!(before - after, s.classes[class].channel_demand);
                } else {
                    assert_eq!(before, after);
                }
            }
            EventKind::Departure { class, .. } => {
                departures += 1;
                assert_eq!(after - before, s.classes[class].channel_demand);
            }
        }
        assert_eq!(u64::from(o.state_after.active_calls()), admits - departures);
    })
    .unwrap();
    assert_eq!(arrivals, 30_000);
}

#[test]
fn warmup_is_excluded() {
    let s = Scenario::at_load(0.5, 20, LoadModel::PerChannel).unwrap();
    let mut cfg = SimConfig::new(10_000, 8, 1);
    cfg.warmup_arrivals = 4_000;
    let m = run(&s, &mut ConventionalPolicy, &cfg).unwrap();
    assert_eq!(m.per_class.iter().map(|c| c.offered).sum::<u64>(), 6_000);
    cfg.warmup_arrivals = 10_000;
    assert!(run(&s, &mut ConventionalPolicy, &cfg).is_err());
}

#[test]
fn departures_precede_simultaneous_arrivals() {
    let dep = Event {
        time: 1.0,
        kind: EventKind::Departure { class: 0, call: 9 },
        seq: 5,
    };
    let arr = Event {
        time: 1.0,
        kind: EventKind::Arrival { class: 0 },
        seq: 1,
    };
    assert!(dep < arr);
    let early = Event { time: 0.5, ..arr };
    assert!(early < dep);
    let later_insert = Event { seq: 2, ..arr };
    assert!(arr < later_insert);
}

#[test]
fn common_random_numbers_across_policies() {
    let s = Scenario::at_load(0.8, 30, LoadModel::PerChannel).unwrap();
    let cfg = SimConfig::new(20_000, 4, 1);
    let a = run(&s, &mut ConventionalPolicy, &cfg).unwrap();
    let b = run(&s, &mut FuzzyPolicy::default(), &cfg).unwrap();
    let offered = |m: &Metrics| m.per_class.iter().map(|c| c.offered).collect::<Vec<_>>();
    assert_eq!(offered(&a), offered(&b));
}

struct Greedy;

impl AdmissionPolicy for Greedy {
    fn name(&self) -> &str {
        "greedy"
    }

    fn decide(&mut self, _: &SystemState, _: &TrafficClass) -> AdmissionDecision {
        AdmissionDecision::Admit
    }
}

#[test]
fn oversubscribing_policy_aborts_the_run() {
    let s = Scenario::at_load(0.9, 5, LoadModel::PerChannel).unwrap();
    let err = run(&s, &mut Greedy, &SimConfig::new(10_000, 1, 1)).unwrap_err();
    assert!(matches!(err, CacError::PolicyViolation(_)));
}

#[test]
fn trace_lines() {
    let s = Scenario::at_load(0.9, 6, LoadModel::PerChannel).unwrap();
    let mut buf = Vec::new();
    run_traced(&s, &mut ConventionalPolicy, &SimConfig::new(200, 1, 1), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("time,kind,class,free_before,decision"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.iter().filter(|l| l.contains(",arrival,")).count(), 200);
    assert!(rows.iter().any(|l| l.ends_with(",-")));
    assert!(rows.iter().any(|l| l.ends_with(&format!("reject:{}", RejectReason::Capacity.label()))));
}

#[test]
fn exact_validation_three_classes() {
    let s = Scenario::at_load(0.6, 30, LoadModel::PerChannel).unwrap();
    let (_, rows) = validate_against_exact(&s, &ConventionalPolicy, &SimConfig::new(100_000, 42, 10)).unwrap();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert!(r.gap <= r.half_width + 0.005, "{r:?}");
    }
}

#[test]
fn exact_validation_zero_load() {
    let s = build_equal_rate_scenario(0.0, 10).unwrap();
    let (_, rows) = validate_against_exact(&s, &ConventionalPolicy, &SimConfig::new(1_000, 1, 3)).unwrap();
    assert!(rows.iter().all(|r| r.gap == 0.0));
}

#[test]
fn exact_validation_single_class_follows_erlang_b() {
    let s = single_class(8.0, 12);
    let (_, rows) = validate_against_exact(&s, &ConventionalPolicy, &SimConfig::new(100_000, 6, 5)).unwrap();
    assert!((rows[0].exact - erlang_b(12, 8.0).unwrap()).abs() < 1e-12);
    assert!(rows[0].gap <= rows[0].half_width + 0.005);
}

#[test]
fn exact_validation_rejects_other_policies() {
    let s = Scenario::at_load(0.6, 30, LoadModel::PerChannel).unwrap();
    let err = validate_against_exact(&s, &FuzzyPolicy::default(), &SimConfig::new(1_000, 1, 2)).unwrap_err();
    assert!(matches!(err, CacError::UnsupportedPolicy(_)));
}
