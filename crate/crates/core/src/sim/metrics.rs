/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Offered and blocked counts of one replication (warmup excluded).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunCounts {
    pub offered: Vec<u64>,
    pub blocked: Vec<u64>,
}

impl RunCounts {
    pub fn new(classes: usize) -> Self {
        Self {
            offered: vec![0; classes],
            blocked: vec![0; classes],
        }
    }

    pub(crate) fn record(&mut self, class: usize, admitted: bool) {
        self.offered[class] += 1;
        if !admitted {
            self.blocked[class] += 1;
        }
    }

    pub fn blocking(&self, class: usize) -> f64 {
        ratio(self.blocked[class], self.offered[class])
    }

    pub fn aggregate_blocking(&self) -> f64 {
        ratio(self.blocked.iter().sum(), self.offered.iter().sum())
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    /// Totals over all replications.
    pub offered: u64,
    pub blocked: u64,
    /// Mean over replications of the per-replication blocking probability.
    pub blocking: f64,
    /// 95% normal-approximation half-width across replications.
    pub half_width: f64,
}

impl ClassMetrics {
    fn from_samples(offered: u64, blocked: u64, samples: &[f64]) -> Self {
        let k = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / k;
        let half_width = if samples.len() < 2 {
            0.0
        } else {
            let var = samples.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (k - 1.0);
            Z_95 * (var / k).sqrt()
        };
        Self {
            offered,
            blocked,
            blocking: mean,
            half_width,
        }
    }

    pub fn ci_low(&self) -> f64 {
        (self.blocking - self.half_width).max(0.0)
    }

    pub fn ci_high(&self) -> f64 {
        (self.blocking + self.half_width).min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    pub per_class: Vec<ClassMetrics>,
    pub aggregate: ClassMetrics,
    pub replications: usize,
    /// Set when only one replication ran, so no half-width could be estimated.
    pub half_width_unavailable: bool,
}

impl Metrics {
    pub fn from_runs(runs: &[RunCounts]) -> Self {
        assert!(!runs.is_empty(), "metrics need at least one run");
        let k = runs[0].offered.len();
        let per_class = (0..k)
            .map(|c| {
                let samples: Vec<f64> = runs.iter().map(|r| r.blocking(c)).collect();
                ClassMetrics::from_samples(
                    runs.iter().map(|r| r.offered[c]).sum(),
                    runs.iter().map(|r| r.blocked[c]).sum(),
                    &samples,
                )
            })
            .collect();
        let samples: Vec<f64> = runs.iter().map(RunCounts::aggregate_blocking).collect();
        let aggregate = ClassMetrics::from_samples(
            runs.iter().flat_map(|r| &r.offered).sum(),
            runs.iter().flat_map(|r| &r.blocked).sum(),
            &samples,
        );
        Self {
            per_class,
            aggregate,
            replications: runs.len(),
            half_width_unavailable: runs.len() < 2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_half_width() {
        let runs: Vec<RunCounts> = [(100, 10), (100, 20), (100, 30)]
            .iter()
            .map(|&(o, b)| RunCounts {
                offered: vec![o],
                blocked: vec![b],
            })
            .collect();
        let m = Metrics::from_runs(&runs);
        let c = &m.per_class[0];
        assert_eq!(c.offered, 300);
        assert_eq!(c.blocked, 60);
        assert!((c.blocking - 0.2).abs() < 1e-15);
        // sample sd 0.1, k = 3
        assert!((c.half_width - Z_95 * 0.1 / 3f64.sqrt()).abs() < 1e-12);
        assert!(!m.half_width_unavailable);
        assert_eq!(m.aggregate.blocking, c.blocking);
    }

    #[test]
    fn single_run_flags_missing_half_width() {
        let m = Metrics::from_runs(&[RunCounts {
            offered: vec![10, 0],
            blocked: vec![3, 0],
        }]);
        assert_eq!(m.per_class[0].half_width, 0.0);
        assert!(m.half_width_unavailable);
        assert_eq!(m.per_class[1].blocking, 0.0);
    }
}
