use super::check_arity;
use crate::error::{invalid, Result};

/// Gaussian RBF network output Σ_i w_i · exp(−‖y − μ_i‖² / (2σ_i)).
pub fn rbf_eval(centers: &[Vec<f64>], widths: &[f64], weights: &[f64], input: &[f64]) -> Result<f64> {
    check_arity(centers.len(), widths.len())?;
    check_arity(centers.len(), weights.len())?;
    let mut y = 0.0;
    for ((c, &s), &w) in centers.iter().zip(widths).zip(weights) {
        if !(s > 0.0) {
            return Err(invalid(format!("RBF width must be positive, got {s}")));
        }
        check_arity(c.len(), input.len())?;
        let d2: f64 = c.iter().zip(input).map(|(a, b)| (b - a) * (b - a)).sum();
        y += w * (-d2 / (2.0 * s)).exp();
    }
    Ok(y)
}
