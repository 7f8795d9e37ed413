use super::{check_arity, ActivationKind};
use crate::error::{invalid, Result};

/// Single-hidden-layer network over the last `n` observations:
/// ŷ = w_0 + Σ_j w_j · g(w_0j + Σ_i w_ij · y(t−i)).
#[derive(Debug, Clone, PartialEq)]
pub struct FeedForwardModel {
    pub inputs: usize,
    pub hidden: usize,
    /// `hidden × inputs`, row-major.
    pub input_weights: Vec<f64>,
    pub hidden_bias: Vec<f64>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
    pub activation: ActivationKind,
}

impl FeedForwardModel {
    pub fn zeros(inputs: usize, hidden: usize, activation: ActivationKind) -> Self {
        Self {
            inputs,
            hidden,
            input_weights: vec![0.0; inputs * hidden],
            hidden_bias: vec![0.0; hidden],
            output_weights: vec![0.0; hidden],
            output_bias: 0.0,
            activation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_weights.len() != self.inputs * self.hidden
            || self.hidden_bias.len() != self.hidden
            || self.output_weights.len() != self.hidden
        {
            return Err(invalid("weight array shapes do not match (inputs, hidden)"));
        }
        Ok(())
    }
}

/// One-step prediction from `history` = (y(t−1), …, y(t−n)).
pub fn feedforward_nar(model: &FeedForwardModel, history: &[f64]) -> Result<f64> {
    model.validate()?;
    check_arity(model.inputs, history.len())?;
    let mut y = model.output_bias;
    for j in 0..model.hidden {
        let row = &model.input_weights[j * model.inputs..(j + 1) * model.inputs];
        let z = model.hidden_bias[j] + row.iter().zip(history).map(|(w, v)| w * v).sum::<f64>();
        y += model.output_weights[j] * model.activation.apply(z);
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_model() {
        let mut m = FeedForwardModel::zeros(3, 4, ActivationKind::LogisticSigmoid);
        m.output_bias = 2.75;
        assert_eq!(feedforward_nar(&m, &[0.3, -1.0, 8.0]).unwrap(), 2.75);
    }

    #[test]
    fn single_logistic_unit() {
        let mut m = FeedForwardModel::zeros(1, 1, ActivationKind::LogisticSigmoid);
        m.input_weights[0] = 1.0;
        m.output_weights[0] = 2.0;
        // 2 * sigma(0) = 2 * 0.5
        assert_eq!(feedforward_nar(&m, &[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn output_layer_is_linear() {
        let mut m = FeedForwardModel::zeros(2, 3, ActivationKind::Gaussian);
        m.input_weights = vec![0.5, -0.2, 1.0, 0.3, -0.7, 0.1];
        m.hidden_bias = vec![0.1, 0.0, -0.3];
        m.output_weights = vec![1.5, -0.5, 0.25];
        m.output_bias = 0.4;
        let h = [0.9, -0.4];
        let base = feedforward_nar(&m, &h).unwrap();
        let k = 3.5;
        m.output_weights.iter_mut().for_each(|w| *w *= k);
        m.output_bias *= k;
        assert!((feedforward_nar(&m, &h).unwrap() - k * base).abs() < 1e-12);
    }

    #[test]
    fn arity_mismatch() {
        let m = FeedForwardModel::zeros(2, 1, ActivationKind::Linear);
        assert!(feedforward_nar(&m, &[1.0]).is_err());
    }
}
