use super::{replicate, Metrics, SimConfig};
use crate::analytic::multirate_exact;
use crate::error::{CacError, Result};
use crate::policy::{AdmissionPolicy, ConventionalPolicy};
use crate::traffic::Scenario;

/// Simulated versus exact complete-sharing blocking for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactComparison {
    pub class: String,
    pub simulated: f64,
    pub half_width: f64,
    pub exact: f64,
    pub gap: f64,
}

/// Replicates the capacity-only policy and compares each class (and the
/// aggregate, last row) with the exact multirate oracle.
pub fn validate_against_exact<P: AdmissionPolicy + ?Sized>(
    scenario: &Scenario,
    policy: &P,
    config: &SimConfig,
) -> Result<(Metrics, Vec<ExactComparison>)> {
    if policy.name() != "conventional" {
        return Err(CacError::UnsupportedPolicy(format!(
            "the exact oracle models complete sharing only; `{}` cannot be validated against it",
            policy.name()
        )));
    }
    let exact = multirate_exact(scenario.capacity, &scenario.classes)?;
    let metrics = replicate(scenario, &ConventionalPolicy, config)?;
    let mut rows: Vec<ExactComparison> = scenario
        .classes
        .iter()
        .zip(&metrics.per_class)
        .zip(&exact.per_class)
        .map(|((c, m), &e)| ExactComparison {
            class: c.type_label(),
            simulated: m.blocking,
            half_width: m.half_width,
            exact: e,
            gap: (m.blocking - e).abs(),
        })
        .collect();
    rows.push(ExactComparison {
        class: "aggregate".into(),
        simulated: metrics.aggregate.blocking,
        half_width: metrics.aggregate.half_width,
        exact: exact.aggregate,
        gap: (metrics.aggregate.blocking - exact.aggregate).abs(),
    });
    Ok((metrics, rows))
}
