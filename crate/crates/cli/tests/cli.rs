use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SWEEP_HEADER: &str = "utilization,policy,class,offered,blocked,blocking_prob,ci_low,ci_high,seed";

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cac-lab")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = lab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analytic_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        ok(&["analytic", "--capacity", "50", "--grid", "0.1:0.9:0.1", "--mode", "paper", "--out", path_str(p)]);
    }
    let text = fs::read_to_string(&a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "utilization,mode,b_type1,b_type2,b_type3,aggregate");
    assert_eq!(lines.len(), 10);
    assert!(lines[3].starts_with("0.3,paper-faithful,"));
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn usage_errors_exit_two() {
    let out = lab(&["analytic", "--capacity", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("N >= 3"));
    assert_eq!(lab(&["analytic", "--grid", "0.5:0.1:0.1"]).status.code(), Some(2));
    assert_eq!(lab(&["analytic", "--mode", "sideways"]).status.code(), Some(2));
    assert_eq!(lab(&["sweep", "--policy", "magic"]).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lab(&["simulate", "--arrivals", "100", "--warmup", "100"]).status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "capacity = 20\ngrid = \"0.2:0.4:0.1\"\nmode = \"cumulative\"\n").unwrap();
    let text = ok(&["analytic", "--config", path_str(&cfg)]);
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(1).unwrap().starts_with("0.2,cumulative,"));
    let text = ok(&["analytic", "--config", path_str(&cfg), "--grid", "0.5"]);
    assert_eq!(text.lines().count(), 2);
    fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(lab(&["analytic", "--config", path_str(&cfg)]).status.code(), Some(2));
}

#[test]
fn exact_command_reports_small_gaps() {
    let text = ok(&["exact", "--capacity", "30", "--grid", "0.6", "--replications", "5", "--arrivals", "40000"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("utilization,class,simulated,half_width,exact,gap"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').enumerate().filter(|(i, _)| *i != 1).map(|(_, v)| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        assert!(r[4] <= r[2] + 0.01, "{r:?}");
    }
}

#[test]
fn sweep_schema_arity_and_determinism() {
    let args = [
        "sweep", "--policy", "conventional,threshold,fuzzy", "--thresholds", "1,3,8", "--grid", "0.3:0.9:0.3", "--capacity", "20",
        "--arrivals", "3000", "--replications", "2", "--seed", "5",
    ];
    let a = ok(&args);
    assert_eq!(a, ok(&args));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], SWEEP_HEADER);
    assert_eq!(lines.len(), 1 + 3 * 3 * 4);
    assert!(lines[1].starts_with("0.3,conventional,type1,"));
    assert!(lines[4].starts_with("0.3,conventional,aggregate,"));
    assert!(lines[5].starts_with("0.3,threshold,type1,"));
    assert!(lines.iter().skip(1).all(|l| l.ends_with(",5")));
    let agg = ok(&[&args[..], &["--mode", "aggregate"]].concat());
    assert_eq!(agg.lines().count(), 1 + 3 * 3);
}

#[test]
fn fncac_without_model_is_a_runtime_error() {
    let out = lab(&["sweep", "--grid", "0.5", "--arrivals", "1000"]);
    assert_eq!(out.status.code(), Some(1));
    let out = lab(&["sweep", "--grid", "0.5", "--arrivals", "1000", "--model", "/nonexistent/model.txt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let text = ok(&["simulate", "--policy", "fuzzy", "--grid", "0.8", "--capacity", "10", "--arrivals", "500", "--replications", "1", "--trace", path_str(&trace)]);
    assert_eq!(text.lines().count(), 5);
    let t = fs::read_to_string(&trace).unwrap();
    assert_eq!(t.lines().next(), Some("time,kind,class,free_before,decision"));
    assert_eq!(t.lines().filter(|l| l.contains(",arrival,")).count(), 500);
    assert_eq!(lab(&["simulate", "--policy", "fuzzy,conventional"]).status.code(), Some(2));
}

#[test]
fn train_then_use_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m.txt");
    let report = dir.path().join("r.txt");
    let args = [
        "train", "--capacity", "20", "--samples", "120", "--epochs", "50", "--grid", "0.5,0.9", "--search-arrivals", "2000", "--out",
        path_str(&model), "--report", path_str(&report),
    ];
    let stdout = ok(&args);
    assert!(stdout.contains("samples=120\n"));
    assert!(stdout.contains("epochs=50\n"));
    assert!(stdout.contains("heldout_accuracy="));
    assert_eq!(fs::read_to_string(&report).unwrap(), stdout);
    let first = fs::read(&model).unwrap();
    ok(&args);
    assert_eq!(fs::read(&model).unwrap(), first);
    assert!(String::from_utf8_lossy(&first).starts_with("fncac v1 rats=3"));

    let sweep = ok(&[
        "sweep", "--policy", "fncac,threshold", "--model", path_str(&model), "--grid", "0.5,0.9", "--capacity", "20", "--arrivals",
        "2000", "--replications", "2",
    ]);
    assert_eq!(sweep.lines().count(), 1 + 2 * 2 * 4);
    assert_eq!(lab(&["train", "--samples", "0", "--out", path_str(&model)]).status.code(), Some(2));
    assert_eq!(lab(&["train"]).status.code(), Some(2));
}

#[test]
fn compare_reductions() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let mut text = format!("{SWEEP_HEADER}\n");
    for (a, conv) in [(0.5, 0.2), (0.9, 0.4)] {
        for (p, b) in [("conventional", conv), ("fuzzy", conv), ("fncac", 0.8 * conv)] {
            text.push_str(&format!("{a},{p},aggregate,1000,1,{b},0,1,1\n"));
        }
    }
    fs::write(&csv, &text).unwrap();
    let out = ok(&["compare", path_str(&csv)]);
    let mean = out.lines().last().unwrap();
    let fields: Vec<&str> = mean.split(',').collect();
    assert_eq!(fields[0], "mean");
    assert!((fields[4].parse::<f64>().unwrap() - 0.2).abs() < 1e-12);
    fs::write(&csv, "not,a,sweep\n").unwrap();
    assert_eq!(lab(&["compare", path_str(&csv)]).status.code(), Some(2));
}

#[test]
fn fuzzy_table() {
    let out = ok(&["fuzzy"]);
    assert!(out.contains("rules:"));
    assert!(out.contains("StronglyAdmit"));
}
