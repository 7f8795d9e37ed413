use super::check_arity;
use super::model::{RrbfnModel, MIN_WIDTH};
use crate::error::{invalid, CacError, Result};
use crate::exec::{self, ExecMode};

const CHUNK: usize = 32;

/// One training example: an input sequence fed from a zero state, and the
/// target for the output after its last step.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub inputs: Vec<Vec<f64>>,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainingSet {
    pub samples: Vec<Sample>,
}

impl TrainingSet {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let set = Self { samples };
        set.validate()?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let first = self.samples.first().ok_or_else(|| invalid("training set is empty"))?;
        let arity = first.inputs.first().map(Vec::len).ok_or_else(|| invalid("empty input sequence"))?;
        for s in &self.samples {
            if s.inputs.is_empty() {
                return Err(invalid("empty input sequence"));
            }
            for u in &s.inputs {
                check_arity(arity, u.len())?;
            }
            if !s.target.is_finite() {
                return Err(invalid("targets must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrainReport {
    /// Mean squared error at the start of each epoch.
    pub epoch_losses: Vec<f64>,
    pub final_loss: f64,
    /// target − prediction per sample after training.
    pub residuals: Vec<f64>,
}

struct Encoded {
    states: Vec<Vec<f64>>,
    targets: Vec<f64>,
}

fn encode(model: &RrbfnModel, data: &TrainingSet) -> Result<Encoded> {
    data.validate()?;
    let states = data
        .samples
        .iter()
        .map(|s| model.encode_sequence(&s.inputs))
        .collect::<Result<Vec<_>>>()?;
    let targets = data.samples.iter().map(|s| s.target).collect();
    Ok(Encoded { states, targets })
}

/// Accumulates `scale · ∂(y − t)²/∂θ` for one sample into `grad`; returns the
/// squared error.
fn accumulate(model: &RrbfnModel, x: &[f64], target: f64, scale: f64, grad: &mut [f64]) -> f64 {
    let n_layers = model.layers.len();
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
    let mut dists: Vec<Vec<f64>> = Vec::with_capacity(n_layers);
    for (i, layer) in model.layers.iter().enumerate() {
        let mut out = Vec::new();
        let mut dist = Vec::new();
        let input = if i == 0 { x } else { &acts[i - 1] };
        layer.forward_into(input, &mut out, &mut dist);
        acts.push(out);
        dists.push(dist);
    }
    let last = &acts[n_layers - 1];
    let y = model.output_bias + model.output_weights.iter().zip(last).map(|(w, h)| w * h).sum::<f64>();
    let err = y - target;
    let dy = scale * 2.0 * err;

    // offsets of each block in the flattened parameter vector
    let mut offsets = Vec::with_capacity(n_layers);
    let mut at = 0;
    for l in &model.layers {
        offsets.push(at);
        at += l.centers.len() + l.widths.len();
    }
    let out_at = at;
    let mut dh: Vec<f64> = Vec::with_capacity(last.len());
    for (k, (&h, &w)) in last.iter().zip(&model.output_weights).enumerate() {
        grad[out_at + k] += dy * h;
        dh.push(dy * w);
    }
    grad[out_at + last.len()] += dy;

    for li in (0..n_layers).rev() {
        let layer = &model.layers[li];
        let z: &[f64] = if li == 0 { x } else { &acts[li - 1] };
        let h = &acts[li];
        let d = &dists[li];
        let base = offsets[li];
        let widths_at = base + layer.centers.len();
        let mut dz = vec![0.0; layer.dim];
        for i in 0..layer.units() {
            let s = layer.widths[i];
            let e = dh[i] * h[i];
            if e == 0.0 {
                continue;
            }
            let c = layer.center(i);
            for j in 0..layer.dim {
                let diff = z[j] - c[j];
                grad[base + i * layer.dim + j] += e * 2.0 * diff / s;
                dz[j] -= e * 2.0 * diff / s;
            }
            grad[widths_at + i] += e * d[i] / (s * s);
        }
        dh = dz;
    }
    err * err
}

fn loss_and_grad(model: &RrbfnModel, enc: &Encoded, exec: ExecMode) -> (f64, Vec<f64>) {
    let n = enc.targets.len();
    let p = model.trainable_len();
    let scale = 1.0 / n as f64;
    let chunks = n.div_ceil(CHUNK);
    let partial = exec::map_indexed(exec, chunks, |c| {
        let mut g = vec![0.0; p];
        let mut sq = 0.0;
        for s in c * CHUNK..((c + 1) * CHUNK).min(n) {
            sq += accumulate(model, &enc.states[s], enc.targets[s], scale, &mut g);
        }
        (sq, g)
    });
    let mut grad = vec![0.0; p];
    let mut sq = 0.0;
    for (s, g) in partial {
        sq += s;
        grad.iter_mut().zip(g).for_each(|(a, b)| *a += b);
    }
    (sq * scale, grad)
}

fn mse(model: &RrbfnModel, enc: &Encoded) -> f64 {
    let n = enc.targets.len() as f64;
    enc.states
        .iter()
        .zip(&enc.targets)
        .map(|(x, t)| (model.output_from_states(x) - t).powi(2))
        .sum::<f64>()
        / n
}

/// Mean squared error of `model` over `data`.
pub fn loss(model: &RrbfnModel, data: &TrainingSet) -> Result<f64> {
    Ok(mse(model, &encode(model, data)?))
}

fn width_mask(model: &RrbfnModel) -> Vec<bool> {
    let mut mask = Vec::with_capacity(model.trainable_len());
    for l in &model.layers {
        mask.extend(std::iter::repeat_n(false, l.centers.len()));
        mask.extend(std::iter::repeat_n(true, l.widths.len()));
    }
    mask.extend(std::iter::repeat_n(false, model.output_weights.len() + 1));
    mask
}

/// Full-batch gradient descent on centers, widths, output weights and bias.
/// Recurrent weights stay fixed; every sample sequence starts from a zero
/// input state.
pub fn train_gradient_descent(model: &mut RrbfnModel, data: &TrainingSet, epochs: usize, step_size: f64) -> Result<TrainReport> {
    if !(step_size > 0.0 && step_size.is_finite()) {
        return Err(invalid(format!("step size must be positive, got {step_size}")));
    }
    let enc = encode(model, data)?;
    let mask = width_mask(model);
    let mut params = model.trainable_params();
    let mut epoch_losses = Vec::with_capacity(epochs);
    for epoch in 0..epochs {
        let (l, grad) = loss_and_grad(model, &enc, ExecMode::Parallel);
        if !l.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(CacError::TrainingDiverged { epoch, loss: l });
        }
        epoch_losses.push(l);
        for ((p, g), &is_width) in params.iter_mut().zip(&grad).zip(&mask) {
            *p -= step_size * g;
            if is_width && *p < MIN_WIDTH {
                *p = MIN_WIDTH;
            }
        }
        model.set_trainable_params(&params);
    }
    let final_loss = mse(model, &enc);
    if !final_loss.is_finite() {
        return Err(CacError::TrainingDiverged {
            epoch: epochs,
            loss: final_loss,
        });
    }
    let residuals = enc
        .states
        .iter()
        .zip(&enc.targets)
        .map(|(x, t)| t - model.output_from_states(x))
        .collect();
    Ok(TrainReport {
        epoch_losses,
        final_loss,
        residuals,
    })
}

/// Largest relative disagreement between the analytic gradient and central
/// finite differences with step `h`, over every trainable parameter.
pub fn gradient_check(model: &RrbfnModel, data: &TrainingSet, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(invalid("finite-difference step must be positive"));
    }
    let enc = encode(model, data)?;
    let (_, analytic) = loss_and_grad(model, &enc, ExecMode::Sequential);
    let base = model.trainable_params();
    let mut probe = model.clone();
    let mut worst: f64 = 0.0;
    for (i, &a) in analytic.iter().enumerate() {
        let mut p = base.clone();
        p[i] = base[i] + h;
        probe.set_trainable_params(&p);
        let up = mse(&probe, &enc);
        p[i] = base[i] - h;
        probe.set_trainable_params(&p);
        let down = mse(&probe, &enc);
        let numeric = (up - down) / (2.0 * h);
        let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-12);
        worst = worst.max(rel);
    }
    Ok(worst)
}
