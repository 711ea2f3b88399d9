#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use workbench_cli::config::{PartialConfig, RunConfig, ThetaField};
use workbench_cli::report::Report;
use workbench_cli::suites::{Runner, Suite};

pub const CONFIG_A: &[&str] = &["--spin", "1/2", "--sites", "3", "--theta", "0.31,-0.17,0.23", "--seed", "42"];

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_workbench"))
}

pub fn workbench(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub fn config(spin: &str, theta: &str) -> RunConfig {
    RunConfig::resolve(PartialConfig {
        spin: Some(spin.into()),
        theta: Some(ThetaField::Text(theta.into())),
        sites: Some(if theta == "zero" { 0 } else { theta.split(',').count() }).filter(|&n| n > 0),
        seed: Some(42),
        ..Default::default()
    })
    .expect("valid configuration")
}

pub fn homogeneous(spin: &str, sites: usize) -> RunConfig {
    RunConfig::resolve(PartialConfig {
        spin: Some(spin.into()),
        sites: Some(sites),
        theta: Some(ThetaField::Text("zero".into())),
        seed: Some(42),
        ..Default::default()
    })
    .expect("valid configuration")
}

pub fn run_suites(cfg: &RunConfig, suites: &[Suite]) -> Report {
    let mut report = Report::new(cfg.echo());
    let mut runner = Runner::new(cfg).expect("runner");
    for &s in suites {
        runner.run(s, &mut report).expect("suite runs");
    }
    report
}

/// Structural equality with numeric slack: strings, booleans and integers
/// must match exactly, floats to `rel` relative or both below `floor`.
pub fn json_close(a: &Value, b: &Value, rel: f64, floor: f64, path: &str) -> Result<(), String> {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) if x.is_f64() || y.is_f64() => {
            let (x, y) = (x.as_f64().unwrap(), y.as_f64().unwrap());
            let ok = (x - y).abs() <= rel * x.abs().max(y.abs()) || (x.abs() < floor && y.abs() < floor);
            ok.then_some(()).ok_or_else(|| format!("{path}: {x} vs {y}"))
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                return Err(format!("{path}: length {} vs {}", x.len(), y.len()));
            }
            x.iter().zip(y).enumerate().try_for_each(|(i, (p, q))| json_close(p, q, rel, floor, &format!("{path}[{i}]")))
        }
        (Value::Object(x), Value::Object(y)) => {
            if x.keys().ne(y.keys()) {
                return Err(format!("{path}: keys differ"));
            }
            x.iter().try_for_each(|(k, v)| json_close(v, &y[k], rel, floor, &format!("{path}.{k}")))
        }
        _ => (a == b).then_some(()).ok_or_else(|| format!("{path}: {a} vs {b}")),
    }
}
