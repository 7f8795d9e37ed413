//! Command-line flags and the optional TOML config file. A flag given on the
//! command line wins over the same key in the file; anything missing from
//! both falls back to the built-in default.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cac-lab", version, about = "Call admission control experiments for a three-class cell")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recurrence blocking over a utilization grid.
    Analytic(Flags),
    /// Simulated capacity-only blocking against the exact multirate oracle.
    Exact(Flags),
    /// Simulate one policy over the grid.
    Simulate(Flags),
    /// Search thresholds, generate labelled samples and train the FNCAC.
    Train(Flags),
    /// Simulate several policies over the grid.
    Sweep(Flags),
    /// Summarize FNCAC blocking reduction from a sweep CSV.
    Compare(CompareFlags),
    /// Print the fuzzy rule table.
    Fuzzy(Flags),
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// TOML file supplying any of these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Total channels N.
    #[arg(long)]
    pub capacity: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replications: Option<usize>,
    /// Arrivals per replication.
    #[arg(long)]
    pub arrivals: Option<u64>,
    /// Leading arrivals excluded from statistics (default 10%).
    #[arg(long)]
    pub warmup: Option<u64>,
    /// start:stop:step, a comma list, or one value.
    #[arg(long)]
    pub grid: Option<String>,
    /// Policy name; `sweep` takes a comma-separated list.
    #[arg(long)]
    pub policy: Option<String>,
    /// analytic: paper | cumulative | exact. simulate/sweep: per-class | aggregate.
    #[arg(long)]
    pub mode: Option<String>,
    /// Trained FNCAC model file.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// per-channel | per-class traffic normalization.
    #[arg(long)]
    pub load: Option<String>,
    /// Fixed threshold set A1,A2,A3 for the threshold policy.
    #[arg(long)]
    pub thresholds: Option<String>,
    /// Fuzzy rule base (TOML) replacing the built-in one.
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// simulate: write the event trace of the first grid point here.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// train: number of labelled samples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub step_size: Option<f64>,
    /// train: desk | paper network sizes.
    #[arg(long)]
    pub preset: Option<String>,
    /// train: Gaussian layer sizes, e.g. 16,8.
    #[arg(long)]
    pub hidden: Option<String>,
    /// train: arrivals per candidate in the threshold search.
    #[arg(long)]
    pub search_arrivals: Option<u64>,
    /// train: also write the report here.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareFlags {
    /// Sweep CSV to summarize.
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($cli:ident, $file:ident, $($f:ident),*) => {
        $( if $cli.$f.is_none() { $cli.$f = $file.$f; } )*
    };
}

impl Flags {
    /// Fills unset flags from the config file, if one was given.
    pub fn resolve(mut self) -> Result<Self, CliError> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = load_config(&path)?;
        merge_fields!(
            self, file, capacity, seed, replications, arrivals, warmup, grid, policy, mode, model, out, load, thresholds, rules,
            trace, samples, epochs, step_size, preset, hidden, search_arrivals, report
        );
        Ok(self)
    }
}

fn load_config(path: &Path) -> Result<Flags, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}
