use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use super::{check_arity, sigmoid};
use crate::error::{invalid, Result};
use crate::rng;

/// Widths are kept at or above this value during training.
pub const MIN_WIDTH: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RrbfnConfig {
    pub input_size: usize,
    /// Gaussian layer sizes; the first operates on the recurrent input
    /// states, each following one on the previous layer's responses.
    pub hidden: Vec<usize>,
    pub width_init: f64,
    /// Standard deviation of the (truncated) normal recurrent weights.
    pub recurrent_std: f64,
    /// Range of the initial output weights, drawn from ±`output_init`.
    pub output_init: f64,
}

impl RrbfnConfig {
    pub fn new(input_size: usize, hidden: Vec<usize>) -> Self {
        Self {
            input_size,
            hidden,
            width_init: 1.0,
            recurrent_std: 0.5,
            output_init: 0.5,
        }
    }

    /// 16 → 8 → 8 → 1.
    pub fn desk() -> Self {
        Self::new(16, vec![8, 8])
    }

    /// 250 → 200 → 200 → 1.
    pub fn paper_scale() -> Self {
        Self::new(250, vec![200, 200])
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_size == 0 || self.hidden.is_empty() || self.hidden.contains(&0) {
            return Err(invalid("every layer needs at least one neuron"));
        }
        if !(self.width_init > 0.0 && self.width_init.is_finite()) {
            return Err(invalid("initial width must be positive"));
        }
        if !(self.recurrent_std > 0.0 && self.output_init >= 0.0) {
            return Err(invalid("initialization scales must be positive"));
        }
        Ok(())
    }
}

/// Gaussian units h_i = exp(−Σ_j (z_j − μ_ij)² / σ_i).
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLayer {
    pub dim: usize,
    /// `units × dim`, row-major.
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
}

impl GaussianLayer {
    pub fn units(&self) -> usize {
        self.widths.len()
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.dim..(i + 1) * self.dim]
    }

    pub(crate) fn forward_into(&self, z: &[f64], out: &mut Vec<f64>, dist: &mut Vec<f64>) {
        out.clear();
        dist.clear();
        for i in 0..self.units() {
            let d2: f64 = self.center(i).iter().zip(z).map(|(c, v)| (v - c) * (v - c)).sum();
            dist.push(d2);
            out.push((-d2 / self.widths[i]).exp());
        }
    }
}

/// Recurrent RBF network: x_j(t) = sigmoid(u_j(t) + r_j · x_j(t−1)) feeding a
/// stack of Gaussian layers and a linear output.
#[derive(Debug, Clone, PartialEq)]
pub struct RrbfnModel {
    pub config: RrbfnConfig,
    pub seed: u64,
    pub recurrent: Vec<f64>,
    state: Vec<f64>,
    pub layers: Vec<GaussianLayer>,
    pub output_weights: Vec<f64>,
    pub output_bias: f64,
}

impl RrbfnModel {
    /// Assembles a model from explicit parameters; the input state starts at 0.
    pub fn from_parts(
        config: RrbfnConfig,
        seed: u64,
        recurrent: Vec<f64>,
        layers: Vec<GaussianLayer>,
        output_weights: Vec<f64>,
        output_bias: f64,
    ) -> Result<Self> {
        let state = vec![0.0; recurrent.len()];
        let m = Self {
            config,
            seed,
            recurrent,
            state,
            layers,
            output_weights,
            output_bias,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.config.validate()?;
        check_arity(self.config.input_size, self.recurrent.len())?;
        check_arity(self.config.hidden.len(), self.layers.len())?;
        if self.recurrent.iter().any(|r| !(-1.0..=1.0).contains(r)) {
            return Err(invalid("recurrent weights must lie in [-1, 1]"));
        }
        let mut dim = self.config.input_size;
        for (layer, &units) in self.layers.iter().zip(&self.config.hidden) {
            if layer.dim != dim || layer.widths.len() != units || layer.centers.len() != units * dim {
                return Err(invalid("Gaussian layer shape does not match the configuration"));
            }
            if layer.widths.iter().any(|s| !(*s > 0.0)) {
                return Err(invalid("Gaussian widths must be positive"));
            }
            dim = units;
        }
        check_arity(dim, self.output_weights.len())
    }

    pub fn input_size(&self) -> usize {
        self.config.input_size
    }

    pub fn input_state(&self) -> &[f64] {
        &self.state
    }

    pub fn reset_state(&mut self) {
        self.state.iter_mut().for_each(|x| *x = 0.0);
    }

    /// Advances the input neurons by one step and returns their new states.
    pub fn advance_inputs(&mut self, input: &[f64]) -> Result<&[f64]> {
        check_arity(self.config.input_size, input.len())?;
        for ((x, &u), &r) in self.state.iter_mut().zip(input).zip(&self.recurrent) {
            *x = sigmoid(u + r * *x);
        }
        Ok(&self.state)
    }

    /// Output for given input-neuron states, without touching the model state.
    pub fn output_from_states(&self, x: &[f64]) -> f64 {
        let mut cur = x.to_vec();
        let mut next = Vec::new();
        let mut dist = Vec::new();
        for layer in &self.layers {
            layer.forward_into(&cur, &mut next, &mut dist);
            std::mem::swap(&mut cur, &mut next);
        }
        self.output_bias + self.output_weights.iter().zip(&cur).map(|(w, h)| w * h).sum::<f64>()
    }

    pub fn step(&mut self, input: &[f64]) -> Result<f64> {
        self.advance_inputs(input)?;
        Ok(self.output_from_states(&self.state))
    }

    /// Input-neuron states after feeding `sequence` from a zero state. The
    /// model's own state is left untouched.
    pub fn encode_sequence(&self, sequence: &[Vec<f64>]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; self.config.input_size];
        for u in sequence {
            check_arity(self.config.input_size, u.len())?;
            for ((xj, &uj), &r) in x.iter_mut().zip(u).zip(&self.recurrent) {
                *xj = sigmoid(uj + r * *xj);
            }
        }
        Ok(x)
    }

    /// Trainable parameters flattened as: per layer centers then widths,
    /// output weights, output bias.
    pub fn trainable_params(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.trainable_len());
        for l in &self.layers {
            p.extend_from_slice(&l.centers);
            p.extend_from_slice(&l.widths);
        }
        p.extend_from_slice(&self.output_weights);
        p.push(self.output_bias);
        p
    }

    pub fn trainable_len(&self) -> usize {
        self.layers.iter().map(|l| l.centers.len() + l.widths.len()).sum::<usize>() + self.output_weights.len() + 1
    }

    pub fn set_trainable_params(&mut self, p: &[f64]) {
        assert_eq!(p.len(), self.trainable_len());
        let mut at = 0;
        for l in &mut self.layers {
            let n = l.centers.len();
            l.centers.copy_from_slice(&p[at..at + n]);
            at += n;
            let n = l.widths.len();
            l.widths.copy_from_slice(&p[at..at + n]);
            at += n;
        }
        let n = self.output_weights.len();
        self.output_weights.copy_from_slice(&p[at..at + n]);
        self.output_bias = p[at + n];
    }
}

/// Free-function form of [`RrbfnModel::step`].
pub fn rrbfn_step(model: &mut RrbfnModel, input: &[f64]) -> Result<f64> {
    model.step(input)
}

/// Free-function form of [`RrbfnModel::reset_state`].
pub fn reset_state(model: &mut RrbfnModel) {
    model.reset_state()
}

fn truncated_normal<R: Rng>(dist: &Normal<f64>, rng: &mut R) -> f64 {
    loop {
        let v = dist.sample(rng);
        if (-1.0..=1.0).contains(&v) {
            return v;
        }
    }
}

/// Random model: recurrent weights from N(0, std²) truncated to [−1, 1],
/// centers uniform on (0, 1), widths at `width_init`, output weights uniform
/// on ±`output_init`, zero bias.
pub fn init_model(config: &RrbfnConfig, seed: u64) -> Result<RrbfnModel> {
    config.validate()?;
    let mut rng = rng::stream(seed, rng::streams::MODEL_INIT);
    let normal = Normal::new(0.0, config.recurrent_std).map_err(|e| invalid(e.to_string()))?;
    let unit = Uniform::new(0.0, 1.0).expect("valid range");
    let recurrent: Vec<f64> = (0..config.input_size).map(|_| truncated_normal(&normal, &mut rng)).collect();
    let mut layers = Vec::with_capacity(config.hidden.len());
    let mut dim = config.input_size;
    for &units in &config.hidden {
        let centers = (0..units * dim).map(|_| unit.sample(&mut rng)).collect();
        layers.push(GaussianLayer {
            dim,
            centers,
            widths: vec![config.width_init; units],
        });
        dim = units;
    }
    let output_weights = (0..dim)
        .map(|_| config.output_init * (2.0 * unit.sample(&mut rng) - 1.0))
        .collect();
    RrbfnModel::from_parts(config.clone(), seed, recurrent, layers, output_weights, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rrbfn::rbf_eval;
    use rand::Rng;

    fn single(recurrent: f64, center: f64, width: f64, weight: f64) -> RrbfnModel {
        RrbfnModel::from_parts(
            RrbfnConfig::new(1, vec![1]),
            0,
            vec![recurrent],
            vec![GaussianLayer {
                dim: 1,
                centers: vec![center],
                widths: vec![width],
            }],
            vec![weight],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn sigmoid_recurrence_by_hand() {
        let mut m = single(1.0, 0.0, 1.0, 1.0);
        m.step(&[0.0]).unwrap();
        assert_eq!(m.input_state()[0], 0.5);
        m.step(&[0.0]).unwrap();
        // sigmoid(0.5)
        assert!((m.input_state()[0] - 0.622459).abs() < 1e-6);
    }

    #[test]
    fn hidden_center_at_state_returns_weight() {
        let mut m = single(0.0, 0.5, 0.3, 1.75);
        assert_eq!(m.step(&[0.0]).unwrap(), 1.75);
    }

    #[test]
    fn stateless_equivalence_with_rbf() {
        let mut rng = rng::stream(99, 0);
        let mut cfg = RrbfnConfig::new(5, vec![4]);
        cfg.width_init = 0.8;
        let mut m = init_model(&cfg, 3).unwrap();
        m.recurrent.iter_mut().for_each(|r| *r = 0.0);
        m.output_bias = 0.0;
        let l = &m.layers[0];
        let centers: Vec<Vec<f64>> = (0..l.units()).map(|i| l.center(i).to_vec()).collect();
        // exp(-d/σ) == exp(-d/(2 · σ/2))
        let half: Vec<f64> = l.widths.iter().map(|s| s / 2.0).collect();
        let weights = m.output_weights.clone();
        for _ in 0..100 {
            let u: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
            let x: Vec<f64> = u.iter().map(|&v| sigmoid(v)).collect();
            let expected = rbf_eval(&centers, &half, &weights, &x).unwrap();
            assert!((m.step(&u).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn recurrence_makes_steps_stateful() {
        let mut m = single(0.8, 0.6, 0.5, 1.0);
        let a = m.step(&[0.2]).unwrap();
        let b = m.step(&[0.2]).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn reset_semantics() {
        let cfg = RrbfnConfig::desk();
        let fresh = init_model(&cfg, 17).unwrap();
        let mut used = fresh.clone();
        let u: Vec<f64> = (0..16).map(|i| i as f64 / 16.0).collect();
        used.step(&u).unwrap();
        used.step(&u).unwrap();
        used.reset_state();
        let once = used.clone();
        used.reset_state();
        assert_eq!(used, once);
        assert_eq!(used.trainable_params(), fresh.trainable_params());
        assert_eq!(used.recurrent, fresh.recurrent);
        assert_eq!(used.step(&u).unwrap(), fresh.clone().step(&u).unwrap());
    }

    #[test]
    fn init_is_deterministic_and_in_range() {
        let cfg = RrbfnConfig::desk();
        assert_eq!(init_model(&cfg, 5).unwrap(), init_model(&cfg, 5).unwrap());
        assert_ne!(init_model(&cfg, 5).unwrap(), init_model(&cfg, 6).unwrap());
        let m = init_model(&RrbfnConfig::new(10_000, vec![1]), 8).unwrap();
        assert!(m.recurrent.iter().all(|r| (-1.0..=1.0).contains(r)));
        let mean = m.recurrent.iter().sum::<f64>() / m.recurrent.len() as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
    }

    #[test]
    fn rejects_empty_layers_and_bad_arity() {
        assert!(init_model(&RrbfnConfig::new(0, vec![3]), 1).is_err());
        assert!(init_model(&RrbfnConfig::new(3, vec![]), 1).is_err());
        assert!(init_model(&RrbfnConfig::new(3, vec![2, 0]), 1).is_err());
        let mut m = init_model(&RrbfnConfig::new(3, vec![2]), 1).unwrap();
        assert!(m.step(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn paper_scale_preset_builds() {
        let mut m = init_model(&RrbfnConfig::paper_scale(), 1).unwrap();
        assert_eq!(m.layers[0].units(), 200);
        assert_eq!(m.layers[1].dim, 200);
        let y = m.step(&vec![0.1; 250]).unwrap();
        assert!(y.is_finite());
    }

    #[test]
    fn param_flattening_round_trips() {
        let mut m = init_model(&RrbfnConfig::desk(), 2).unwrap();
        let p = m.trainable_params();
        assert_eq!(p.len(), 16 * 8 + 8 + 8 * 8 + 8 + 8 + 1);
        let shifted: Vec<f64> = p.iter().map(|v| v + 1.0).collect();
        m.set_trainable_params(&shifted);
        assert_eq!(m.trainable_params(), shifted);
    }
}
