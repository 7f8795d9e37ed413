//! Call admission control laboratory for a three-class heterogeneous cell.
//!
//! - [`traffic`]: QoS classes, Poisson/exponential sampling, scenarios.
//! - [`analytic`]: recurrence blocking model plus exact Erlang-B and
//!   multirate oracles.
//! - [`policy`]: capacity-only, threshold and fuzzy admission.
//! - [`rrbfn`]: feed-forward NAR, RBF and recurrent RBF networks.
//! - [`fncac`]: the fuzzy-neural controller built on the recurrent RBF net.
//! - [`sim`]: seeded discrete-event simulation with replications.

pub mod analytic;
pub mod error;
pub mod exec;
pub mod fncac;
pub mod policy;
pub mod rrbfn;
pub mod rng;
pub mod sim;
pub mod traffic;

pub use error::{CacError, Result};
