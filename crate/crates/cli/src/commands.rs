use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cac_core::analytic::{multirate_exact, sweep_analytic, write_analytic_csv, ReadoutMode, SweepRow};
use cac_core::exec::{self, ExecMode};
use cac_core::fncac::{read_fncac, run_pipeline, search_thresholds, write_fncac, FncacConfig, FncacModel, FncacPolicy, PipelineConfig, SearchConfig};
use cac_core::policy::{ConventionalPolicy, FuzzyPolicy, FuzzySystem, Policy, ThresholdPolicy, ThresholdSchedule, ThresholdSet};
use cac_core::sim::{self, Metrics, SimConfig};
use cac_core::traffic::{LoadModel, Scenario};

use crate::args::{CompareFlags, Flags};
use crate::compare::{compare_sweep, render, SWEEP_HEADER};
use crate::error::CliError;
use crate::grid::parse_grid;

const DEFAULT_CAPACITY: u32 = 50;
const DEFAULT_SEED: u64 = 1;
const DEFAULT_REPLICATIONS: usize = 5;
const DEFAULT_ARRIVALS: u64 = 50_000;
const DEFAULT_GRID: &str = "0.1:0.9:0.1";
const DEFAULT_SWEEP_POLICIES: &str = "conventional,fuzzy,fncac";
const POLICY_NAMES: [&str; 4] = ["conventional", "threshold", "fuzzy", "fncac"];

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn capacity(f: &Flags) -> Result<u32, CliError> {
    let n = f.capacity.unwrap_or(DEFAULT_CAPACITY);
    if n < 3 {
        return Err(usage(format!("capacity must satisfy N >= 3, got {n}")));
    }
    Ok(n)
}

fn grid(f: &Flags) -> Result<Vec<f64>, CliError> {
    parse_grid(f.grid.as_deref().unwrap_or(DEFAULT_GRID)).map_err(usage)
}

fn load(f: &Flags) -> Result<LoadModel, CliError> {
    Ok(f.load.as_deref().unwrap_or("per-channel").parse::<LoadModel>()?)
}

fn sim_config(f: &Flags) -> Result<SimConfig, CliError> {
    let mut cfg = SimConfig::new(
        f.arrivals.unwrap_or(DEFAULT_ARRIVALS),
        f.seed.unwrap_or(DEFAULT_SEED),
        f.replications.unwrap_or(DEFAULT_REPLICATIONS),
    );
    if let Some(w) = f.warmup {
        cfg.warmup_arrivals = w;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Whether simulated output lists every class or only the aggregate.
fn per_class(f: &Flags) -> Result<bool, CliError> {
    match f.mode.as_deref().unwrap_or("per-class") {
        "per-class" => Ok(true),
        "aggregate" => Ok(false),
        other => Err(usage(format!("unknown mode `{other}` (expected per-class or aggregate)"))),
    }
}

fn read_text(path: &Path, what: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Runtime(format!("cannot read {what} {}: {e}", path.display())))
}

pub fn analytic(f: &Flags) -> Result<(), CliError> {
    let n = capacity(f)?;
    let grid = grid(f)?;
    let mode: ReadoutMode = f.mode.as_deref().unwrap_or("paper").parse()?;
    let rows = if mode == ReadoutMode::Exact {
        let load = load(f)?;
        grid.iter()
            .map(|&a| {
                let s = Scenario::at_load(a, n, load)?;
                Ok(SweepRow {
                    utilization: a,
                    report: multirate_exact(n, &s.classes)?,
                })
            })
            .collect::<cac_core::Result<Vec<_>>>()?
    } else {
        sweep_analytic(&grid, n, mode, ExecMode::default())?
    };
    let mut buf = Vec::new();
    write_analytic_csv(&rows, &mut buf)?;
    emit(f.out.as_deref(), &buf)
}

pub fn exact(f: &Flags) -> Result<(), CliError> {
    let n = capacity(f)?;
    let grid = grid(f)?;
    let load = load(f)?;
    let cfg = sim_config(f)?;
    let mut out = String::from("utilization,class,simulated,half_width,exact,gap\n");
    for &a in &grid {
        let s = Scenario::at_load(a, n, load)?;
        let (_, rows) = sim::validate_against_exact(&s, &ConventionalPolicy, &cfg)?;
        for r in rows {
            let _ = writeln!(out, "{a},{},{:?},{:?},{:?},{:?}", r.class, r.simulated, r.half_width, r.exact, r.gap);
        }
    }
    emit(f.out.as_deref(), out.as_bytes())
}

/// Builds policies by name, loading the model and searching thresholds at
/// most once.
struct PolicyFactory<'a> {
    flags: &'a Flags,
    capacity: u32,
    grid: &'a [f64],
    load: LoadModel,
    seed: u64,
    model: Option<FncacModel>,
}

impl<'a> PolicyFactory<'a> {
    fn model(&mut self) -> Result<&FncacModel, CliError> {
        if self.model.is_none() {
            let path = self
                .flags
                .model
                .as_ref()
                .ok_or_else(|| CliError::Runtime("the fncac policy needs a trained model (--model)".into()))?;
            let text = read_text(path, "model file")?;
            let m = read_fncac(&text).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
            self.model = Some(m);
        }
        Ok(self.model.as_ref().expect("loaded above"))
    }

    fn schedule(&mut self) -> Result<ThresholdSchedule, CliError> {
        if let Some(t) = &self.flags.thresholds {
            return Ok(ThresholdSchedule::constant(t.parse::<ThresholdSet>()?));
        }
        if self.flags.model.is_some() {
            if let Some(s) = &self.model()?.oracle {
                return Ok(s.clone());
            }
        }
        let mut cfg = SearchConfig::new(self.capacity, self.seed);
        cfg.levels = self.grid.to_vec();
        cfg.load = self.load;
        if let Some(n) = self.flags.search_arrivals {
            cfg.arrivals = n;
        }
        Ok(search_thresholds(&cfg)?)
    }

    fn build(&mut self, name: &str) -> Result<Policy, CliError> {
        Ok(match name {
            "conventional" => Policy::Conventional(ConventionalPolicy),
            "threshold" => Policy::Threshold(ThresholdPolicy::scheduled(self.schedule()?)),
            "fuzzy" => {
                let system = match &self.flags.rules {
                    Some(p) => FuzzySystem::from_toml_str(&read_text(p, "rule file")?)?,
                    None => FuzzySystem::default(),
                };
                Policy::Fuzzy(FuzzyPolicy::new(system))
            }
            "fncac" => Policy::Fncac(Box::new(FncacPolicy::new(self.model()?.clone()))),
            other => return Err(usage(format!("unknown policy `{other}` (expected one of {})", POLICY_NAMES.join(", ")))),
        })
    }
}

fn policy_list(spec: &str) -> Result<Vec<String>, CliError> {
    let names: Vec<String> = spec.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(usage("no policy given"));
    }
    for (i, n) in names.iter().enumerate() {
        if !POLICY_NAMES.contains(&n.as_str()) {
            return Err(usage(format!("unknown policy `{n}` (expected one of {})", POLICY_NAMES.join(", "))));
        }
        if names[..i].contains(n) {
            return Err(usage(format!("policy `{n}` listed twice")));
        }
    }
    Ok(names)
}

fn write_metrics(out: &mut String, a: f64, policy: &str, m: &Metrics, labels: &[String], per_class: bool, seed: u64) {
    let mut row = |class: &str, c: &sim::ClassMetrics| {
        let _ = writeln!(
            out,
            "{a},{policy},{class},{},{},{:?},{:?},{:?},{seed}",
            c.offered,
            c.blocked,
            c.blocking,
            c.ci_low(),
            c.ci_high()
        );
    };
    if per_class {
        for (label, c) in labels.iter().zip(&m.per_class) {
            row(label, c);
        }
    }
    row("aggregate", &m.aggregate);
}

/// Replicates every (grid point, policy) pair and renders the sweep CSV in
/// grid-then-policy order.
fn run_sweep(f: &Flags, names: &[String], trace: Option<&Path>) -> Result<String, CliError> {
    let n = capacity(f)?;
    let grid = grid(f)?;
    let load = load(f)?;
    let mut cfg = sim_config(f)?;
    cfg.exec = ExecMode::Sequential;
    let per_class = per_class(f)?;
    let scenarios = grid.iter().map(|&a| Scenario::at_load(a, n, load)).collect::<cac_core::Result<Vec<_>>>()?;
    let mut factory = PolicyFactory {
        flags: f,
        capacity: n,
        grid: &grid,
        load,
        seed: cfg.seed,
        model: None,
    };
    let policies = names.iter().map(|p| factory.build(p)).collect::<Result<Vec<_>, _>>()?;

    if let Some(path) = trace {
        let mut trace_cfg = cfg.clone();
        trace_cfg.seed = cfg.replication_seed(0);
        let mut p = policies[0].clone();
        let file = fs::File::create(path).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        sim::run_traced(&scenarios[0], &mut p, &trace_cfg, std::io::BufWriter::new(file))?;
    }

    let jobs = grid.len() * policies.len();
    let results = exec::map_indexed(ExecMode::default(), jobs, |j| {
        sim::replicate(&scenarios[j / policies.len()], &policies[j % policies.len()], &cfg)
    });
    let labels: Vec<String> = scenarios[0].classes.iter().map(|c| c.type_label()).collect();
    let mut out = format!("{SWEEP_HEADER}\n");
    for (j, m) in results.into_iter().enumerate() {
        let m = m?;
        write_metrics(&mut out, grid[j / policies.len()], &names[j % policies.len()], &m, &labels, per_class, cfg.seed);
    }
    Ok(out)
}

pub fn simulate(f: &Flags) -> Result<(), CliError> {
    let name = f.policy.as_deref().unwrap_or("conventional");
    let names = policy_list(name)?;
    if names.len() != 1 {
        return Err(usage("simulate takes a single policy; use sweep to compare several"));
    }
    let out = run_sweep(f, &names, f.trace.as_deref())?;
    emit(f.out.as_deref(), out.as_bytes())
}

pub fn sweep(f: &Flags) -> Result<(), CliError> {
    let names = policy_list(f.policy.as_deref().unwrap_or(DEFAULT_SWEEP_POLICIES))?;
    let out = run_sweep(f, &names, None)?;
    emit(f.out.as_deref(), out.as_bytes())
}

fn parse_hidden(spec: &str) -> Result<Vec<usize>, CliError> {
    spec.split(',')
        .map(|h| h.trim().parse::<usize>().map_err(|e| usage(format!("bad layer size `{h}`: {e}"))))
        .collect()
}

pub fn train(f: &Flags) -> Result<(), CliError> {
    let n = capacity(f)?;
    let seed = f.seed.unwrap_or(DEFAULT_SEED);
    let out: PathBuf = f.out.clone().ok_or_else(|| usage("train needs --out for the model file"))?;
    let mut cfg = PipelineConfig::new(n, seed);
    cfg.search.levels = grid(f)?;
    cfg.search.load = load(f)?;
    if let Some(a) = f.search_arrivals {
        cfg.search.arrivals = a;
    }
    if let Some(s) = f.samples {
        if s == 0 {
            return Err(usage("--samples must be at least 1"));
        }
        cfg.samples = s;
    }
    cfg.train = match f.preset.as_deref().unwrap_or("desk") {
        "desk" => FncacConfig::desk(),
        "paper" => FncacConfig::paper_scale(),
        other => return Err(usage(format!("unknown preset `{other}` (expected desk or paper)"))),
    };
    if let Some(h) = &f.hidden {
        cfg.train.hidden = parse_hidden(h)?;
    }
    if let Some(e) = f.epochs {
        cfg.train.epochs = e;
    }
    if let Some(s) = f.step_size {
        cfg.train.step_size = s;
    }
    cfg.train.validate()?;
    if !(cfg.train.step_size > 0.0 && cfg.train.step_size.is_finite()) {
        return Err(usage(format!("step size must be positive, got {}", cfg.train.step_size)));
    }

    let (model, report) = run_pipeline(&cfg)?;
    let mut file = Vec::new();
    write_fncac(&model, &mut file)?;
    emit(Some(&out), &file)?;

    let hidden: Vec<String> = cfg.train.hidden.iter().map(usize::to_string).collect();
    let schedule: Vec<String> = model
        .oracle
        .iter()
        .flat_map(|s| &s.levels)
        .map(|(a, t)| format!("{a}:{t}"))
        .collect();
    let mut text = String::new();
    let _ = writeln!(text, "seed={seed}");
    let _ = writeln!(text, "capacity={n}");
    let _ = writeln!(text, "samples={}", report.samples);
    let _ = writeln!(text, "train_size={}", report.train_size);
    let _ = writeln!(text, "test_size={}", report.test_size);
    let _ = writeln!(text, "hidden={}", hidden.join(","));
    let _ = writeln!(text, "epochs={}", report.epochs);
    let _ = writeln!(text, "step_size={}", cfg.train.step_size);
    let _ = writeln!(text, "thresholds={}", schedule.join(";"));
    let _ = writeln!(text, "admit_fraction={}", report.admit_fraction);
    let _ = writeln!(text, "initial_loss={}", report.initial_loss);
    let _ = writeln!(text, "final_loss={}", report.final_loss);
    let _ = writeln!(text, "train_accuracy={}", report.train_accuracy);
    let _ = writeln!(text, "heldout_accuracy={}", report.heldout_accuracy);
    if let Some(p) = &f.report {
        emit(Some(p), text.as_bytes())?;
    }
    emit(None, text.as_bytes())
}

pub fn compare(f: &CompareFlags) -> Result<(), CliError> {
    let text = read_text(&f.input, "sweep CSV")?;
    let c = compare_sweep(&text).map_err(|e| usage(format!("{}: {e}", f.input.display())))?;
    emit(f.out.as_deref(), render(&c).as_bytes())
}

pub fn fuzzy(f: &Flags) -> Result<(), CliError> {
    let system = match &f.rules {
        Some(p) => FuzzySystem::from_toml_str(&read_text(p, "rule file")?)?,
        None => FuzzySystem::default(),
    };
    emit(f.out.as_deref(), system.describe().as_bytes())
}
