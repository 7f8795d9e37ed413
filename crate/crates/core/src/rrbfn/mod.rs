//! Neural predictors: the feed-forward NAR network, the Gaussian RBF network
//! and the recurrent RBF network (sigmoidal self-connected inputs feeding
//! Gaussian layers), trained by full-batch gradient descent.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, CacError, Result};

mod feedforward;
pub(crate) mod io;
mod model;
mod rbf;
mod train;

pub use feedforward::{feedforward_nar, FeedForwardModel};
pub use io::{read_model, write_model};
pub use model::{init_model, reset_state, rrbfn_step, GaussianLayer, RrbfnConfig, RrbfnModel, MIN_WIDTH};
pub use rbf::rbf_eval;
pub use train::{gradient_check, loss, train_gradient_descent, Sample, TrainReport, TrainingSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    LogisticSigmoid,
    Gaussian,
    Linear,
}

impl ActivationKind {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            ActivationKind::LogisticSigmoid => sigmoid(z),
            ActivationKind::Gaussian => (-z * z).exp(),
            ActivationKind::Linear => z,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ActivationKind::LogisticSigmoid => "logistic-sigmoid",
            ActivationKind::Gaussian => "gaussian",
            ActivationKind::Linear => "linear",
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ActivationKind {
    type Err = CacError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "logistic-sigmoid" => Ok(ActivationKind::LogisticSigmoid),
            "gaussian" => Ok(ActivationKind::Gaussian),
            "linear" => Ok(ActivationKind::Linear),
            other => Err(invalid(format!("unknown activation `{other}`"))),
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn check_arity(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(CacError::ArityMismatch { expected, actual });
    }
    Ok(())
}
