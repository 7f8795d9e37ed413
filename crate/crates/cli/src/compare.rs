//! Relative blocking reduction of the FNCAC rows of a sweep CSV.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

pub const SWEEP_HEADER: &str = "utilization,policy,class,offered,blocked,blocking_prob,ci_low,ci_high,seed";

#[derive(Debug, Deserialize)]
struct SweepRecord {
    utilization: f64,
    policy: String,
    class: String,
    blocking_prob: f64,
}

/// `1 − candidate / baseline`. A baseline without blocking counts as no
/// change when the candidate also has none and as −100% otherwise.
pub fn reduction(baseline: f64, candidate: f64) -> f64 {
    if baseline > 0.0 {
        1.0 - candidate / baseline
    } else if candidate > 0.0 {
        -1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub utilization: f64,
    pub conventional: f64,
    pub fuzzy: Option<f64>,
    pub fncac: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub mean_vs_conventional: f64,
    pub mean_vs_fuzzy: Option<f64>,
}

/// Parses a sweep CSV and compares the aggregate rows.
pub fn compare_sweep(text: &str) -> Result<Comparison, String> {
    let header = text.lines().next().unwrap_or("");
    if header.trim_end() != SWEEP_HEADER {
        return Err(format!("expected header `{SWEEP_HEADER}`, found `{header}`"));
    }
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    // Keyed by utilization in nanounits so the map iterates in grid order.
    let mut points: BTreeMap<i64, BTreeMap<String, f64>> = BTreeMap::new();
    for (i, rec) in reader.deserialize::<SweepRecord>().enumerate() {
        let rec = rec.map_err(|e| format!("row {}: {e}", i + 2))?;
        if rec.class != "aggregate" {
            continue;
        }
        let key = (rec.utilization * 1e9).round() as i64;
        if points.entry(key).or_default().insert(rec.policy.clone(), rec.blocking_prob).is_some() {
            return Err(format!("duplicate aggregate row for {} at utilization {}", rec.policy, rec.utilization));
        }
    }
    if points.is_empty() {
        return Err("no aggregate rows found".into());
    }
    let mut rows = Vec::with_capacity(points.len());
    for (key, by_policy) in &points {
        let utilization = *key as f64 / 1e9;
        let get = |p: &str| by_policy.get(p).copied();
        let missing = |p: &str| format!("no {p} aggregate row at utilization {utilization}");
        rows.push(ComparisonRow {
            utilization,
            conventional: get("conventional").ok_or_else(|| missing("conventional"))?,
            fuzzy: get("fuzzy"),
            fncac: get("fncac").ok_or_else(|| missing("fncac"))?,
        });
    }
    let n = rows.len() as f64;
    let mean_vs_conventional = rows.iter().map(|r| reduction(r.conventional, r.fncac)).sum::<f64>() / n;
    let mean_vs_fuzzy = rows
        .iter()
        .map(|r| r.fuzzy.map(|f| reduction(f, r.fncac)))
        .sum::<Option<f64>>()
        .map(|s| s / n);
    Ok(Comparison {
        rows,
        mean_vs_conventional,
        mean_vs_fuzzy,
    })
}

pub fn render(c: &Comparison) -> String {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from("utilization,conventional,fuzzy,fncac,reduction_vs_conventional,reduction_vs_fuzzy\n");
    for r in &c.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.utilization,
            r.conventional,
            opt(r.fuzzy),
            r.fncac,
            reduction(r.conventional, r.fncac),
            opt(r.fuzzy.map(|f| reduction(f, r.fncac)))
        );
    }
    let _ = writeln!(out, "mean,,,,{},{}", c.mean_vs_conventional, opt(c.mean_vs_fuzzy));
    out
}
