use std::collections::HashMap;

use cac_core::analytic::erlang_b;
use cac_core::policy::{ConventionalPolicy, ThresholdPolicy, ThresholdSet};
use cac_core::sim::{replicate, validate_against_exact, SimConfig};
use cac_core::traffic::{LoadModel, Scenario, TrafficClass};

#[test]
fn single_class_erlang_b() {
    let c = TrafficClass::new(1, "conversational", 1, 10.0, 1.0).unwrap();
    let s = Scenario::new(20, 10.0, vec![c]).unwrap();
    let m = replicate(&s, &ConventionalPolicy, &SimConfig::new(100_000, 11, 10)).unwrap();
    let exact = erlang_b(20, 10.0).unwrap();
    assert!((m.aggregate.blocking - exact).abs() <= 0.005);
}

#[test]
fn three_classes_against_multirate() {
    let s = Scenario::at_load(0.6, 30, LoadModel::PerChannel).unwrap();
    let (_, rows) = validate_against_exact(&s, &ConventionalPolicy, &SimConfig::new(100_000, 12, 10)).unwrap();
    for r in rows {
        assert!(r.gap <= r.half_width + 0.005, "{r:?}");
    }
}

#[test]
fn capacity_thresholds_reproduce_complete_sharing() {
    // A = (1, 2, 3) admits exactly when the call fits.
    let s = Scenario::at_load(0.8, 40, LoadModel::PerChannel).unwrap();
    let cfg = SimConfig::new(20_000, 13, 3);
    let t = ThresholdPolicy::new(ThresholdSet::new(1, 2, 3).unwrap());
    assert_eq!(replicate(&s, &t, &cfg).unwrap(), replicate(&s, &ConventionalPolicy, &cfg).unwrap());
}

/// Stationary blocking of the threshold policy from its Markov chain,
/// solved by Gauss-Seidel sweeps of the balance equations.
fn ctmc_threshold_blocking(s: &Scenario, t: ThresholdSet) -> Vec<f64> {
    let n = s.capacity;
    let b: Vec<u32> = s.classes.iter().map(|c| c.channel_demand).collect();
    let bounds = [t.a1, t.a2, t.a3];
    let mut states = Vec::new();
    for n1 in 0..=n {
        for n2 in 0..=n / 2 {
            for n3 in 0..=n / 3 {
                if n1 * b[0] + n2 * b[1] + n3 * b[2] <= n {
                    states.push([n1, n2, n3]);
                }
            }
        }
    }
    let index: HashMap<[u32; 3], usize> = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let free = |st: &[u32; 3]| n - (st[0] * b[0] + st[1] * b[1] + st[2] * b[2]);
    let admits = |st: &[u32; 3], k: usize| {
        let f = free(st);
        f >= b[k] && f >= bounds[k]
    };
    let lam: Vec<f64> = s.classes.iter().map(|c| c.arrival_rate).collect();
    let mu: Vec<f64> = s.classes.iter().map(|c| c.service_rate).collect();
    let out_rate: Vec<f64> = states
        .iter()
        .map(|st| (0..3).map(|k| if admits(st, k) { lam[k] } else { 0.0 } + f64::from(st[k]) * mu[k]).sum())
        .collect();
    let mut pi = vec![1.0 / states.len() as f64; states.len()];
    for _ in 0..5_000 {
        let mut delta: f64 = 0.0;
        for (i, st) in states.iter().enumerate() {
            let mut inflow = 0.0;
            for k in 0..3 {
                // Arrival into st from st - e_k.
                if st[k] > 0 {
                    let mut prev = *st;
                    prev[k] -= 1;
                    if admits(&prev, k) {
                        inflow += pi[index[&prev]] * lam[k];
                    }
                }
                // Departure into st from st + e_k.
                let mut next = *st;
                next[k] += 1;
                if let Some(&j) = index.get(&next) {
                    inflow += pi[j] * f64::from(next[k]) * mu[k];
                }
            }
            let v = inflow / out_rate[i];
            delta = delta.max((v - pi[i]).abs());
            pi[i] = v;
        }
        let total: f64 = pi.iter().sum();
        pi.iter_mut().for_each(|p| *p /= total);
        if delta < 1e-14 {
            break;
        }
    }
    (0..3)
        .map(|k| states.iter().zip(&pi).filter(|(st, _)| !admits(st, k)).map(|(_, p)| p).sum())
        .collect()
}

#[test]
fn threshold_policy_matches_its_markov_chain() {
    let s = Scenario::at_load(0.8, 12, LoadModel::PerChannel).unwrap();
    let t = ThresholdSet::new(1, 3, 6).unwrap();
    let exact = ctmc_threshold_blocking(&s, t);
    let m = replicate(&s, &ThresholdPolicy::new(t), &SimConfig::new(100_000, 14, 10)).unwrap();
    for (c, e) in m.per_class.iter().zip(&exact) {
        assert!((c.blocking - e).abs() <= c.half_width + 0.005, "{} vs {e}", c.blocking);
    }
}
