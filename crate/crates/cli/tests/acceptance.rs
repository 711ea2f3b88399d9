//! Acceptance criteria, one line per criterion.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use workbench_cli::config::RunConfig;
use workbench_cli::report::{CheckRecord, Report};
use workbench_cli::suites::Suite;

struct Outcome {
    pass: bool,
    detail: String,
}

fn worst<'a>(rows: impl Iterator<Item = &'a CheckRecord>) -> (usize, f64, Option<String>) {
    let mut n = 0;
    let mut max = 0.0f64;
    let mut failed = None;
    for r in rows {
        n += 1;
        if r.residual.0.is_nan() {
            failed.get_or_insert_with(|| r.name.clone());
        }
        max = max.max(r.residual.0);
    }
    (n, max, failed)
}

fn rows<'a>(report: &'a Report, prefixes: &'a [&str]) -> impl Iterator<Item = &'a CheckRecord> + 'a {
    report.checks.iter().filter(move |c| prefixes.iter().any(|p| c.name.starts_with(p)))
}

/// Every selected row below `tol`, at least one row present.
fn bounded(report: &Report, prefixes: &[&str], tol: f64) -> (bool, String) {
    let (n, max, failed) = worst(rows(report, prefixes));
    let ok = n > 0 && failed.is_none() && max < tol;
    let mut detail = format!("{n} rows, max {max:.2e} < {tol:.0e}");
    if let Some(name) = failed {
        detail.push_str(&format!(", {name} not evaluated"));
    }
    (ok, detail)
}

fn config_a() -> RunConfig {
    config("1/2", "0.31,-0.17,0.23")
}

fn config_b() -> RunConfig {
    config("1", "0.31,-0.17")
}

fn config_c() -> RunConfig {
    config("3/2", "0.31")
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, cfg) in [("A", config_a()), ("B", config_b()), ("C", config_c())] {
        let r = run_suites(&cfg, &[Suite::Ybe, Suite::Reflection, Suite::Fusion]);
        let (ok, d) = bounded(&r, &["ybe/", "reflection/", "fusion/"], 1e-10);
        pass &= ok;
        parts.push(format!("{label}: {d}"));
    }
    let t = start.elapsed();
    pass &= t < Duration::from_secs(10);
    Outcome { pass, detail: format!("{}; {:.2}s", parts.join("; "), t.as_secs_f64()) }
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let names = [
        "transfer/commutativity",
        "transfer/crossing",
        "transfer/value at zero",
        "transfer/asymptotic",
        "transfer/hierarchy",
        "transfer/closure",
    ];
    for (label, cfg, tol) in [("A", config_a(), 1e-8), ("B", config_b(), 1e-8), ("C", config_c(), 1e-7)] {
        let r = run_suites(&cfg, &[Suite::Transfer]);
        for n in names {
            pass &= rows(&r, &[n]).count() > 0;
        }
        let (ok, d) = bounded(&r, &names, tol);
        pass &= ok;
        parts.push(format!("{label}: {d}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, cfg) in [("A", config_a()), ("B", config_b())] {
        let r = run_suites(&cfg, &[Suite::Gauge]);
        let (ok, d) = bounded(&r, &["gauge/one-row", "gauge/double-row", "gauge/Det_q", "gauge/A(", "gauge/C(", "gauge/D("], 1e-9);
        let qdet = rows(&r, &["gauge/double-row quantum determinant"]).count() == 1;
        pass &= ok && qdet && r.passed();
        parts.push(format!("{label}: {d}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, cfg) in [("A", config_a()), ("B", config_b())] {
        let r = run_suites(&cfg, &[Suite::Sov, Suite::Scalar]);
        let (e, de) = bounded(&r, &["sov/right C-eigen", "sov/left C-eigen"], 1e-8);
        let (f, df) = bounded(&r, &["scalar/", "sov/vacuum overlap", "sov/reflected pairing"], 1e-7);
        let cond = rows(&r, &["sov/right basis condition"]).next().map(|c| c.residual.0).unwrap_or(f64::NAN);
        let c = cond.is_finite() && cond < 1e12;
        pass &= e && f && c && r.passed();
        parts.push(format!("{label}: eigen {de}; overlaps {df}; cond {cond:.2e}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, cfg) in [("A", config_a()), ("B", config_b()), ("C", config_c())] {
        let start = Instant::now();
        let r = run_suites(&cfg, &[Suite::Tq, Suite::Bethe]);
        let t = start.elapsed();
        let p = &cfg.params;
        let m = p.spin.twice() as usize * p.sites();
        let states = p.hilbert_dim();
        let roots_ok = r.bethe.len() == states && r.bethe.iter().all(|b| b.roots.len() == m && b.error.is_none());
        let (fit, dfit) = bounded(&r, &["tq/"], 1e-7);
        let fit = fit && rows(&r, &["tq/"]).filter(|c| c.name.ends_with("] fit")).count() == states;
        let bae = r.bethe.iter().flat_map(|b| b.bae_residuals.iter()).map(|x| x.0).fold(0.0, f64::max);
        let fid = r.bethe.iter().map(|b| b.fidelity.0).fold(f64::INFINITY, f64::min);
        let ok = roots_ok && fit && bae < 1e-10 && fid > 1.0 - 1e-7 && t < Duration::from_secs(60);
        pass &= ok;
        parts.push(format!(
            "{label}: {states} states x {m} roots, tq {dfit}, BAE {bae:.2e}, min fidelity 1-{:.1e}, {:.2}s",
            (1.0 - fid).max(0.0),
            t.as_secs_f64()
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_6() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, cfg) in [("A'", homogeneous("1/2", 3)), ("B'", homogeneous("1", 2))] {
        let r = run_suites(&cfg, &[Suite::Bethe]);
        let (res, dres) = bounded(&r, &["bethe/["], 1e-6);
        let states = rows(&r, &["bethe/["]).filter(|c| c.name.ends_with("eigenstate residual")).count();
        pass &= res && states == cfg.params.hilbert_dim() && r.passed();
        parts.push(format!("{label}: {states} states, {dres}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_7() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, cfg) in [("A'", homogeneous("1/2", 3)), ("B'", homogeneous("1", 2))] {
        let r = run_suites(&cfg, &[Suite::Transfer]);
        let (ok, d) = bounded(&r, &["transfer/hamiltonian"], 1e-8);
        pass &= ok;
        parts.push(format!("{label}: {d}"));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn criterion_8() -> Outcome {
    let mut args = vec!["check", "--suite", "all"];
    args.extend_from_slice(CONFIG_A);
    let first = workbench(&args);
    let second = workbench(&args);
    let identical = first.stdout == second.stdout && !first.stdout.is_empty();
    let exit0 = first.status.code() == Some(0);
    let golden = std::fs::read_to_string(golden_path("config_a_check.json")).unwrap_or_default();
    let matches = match (serde_json::from_slice(&first.stdout), serde_json::from_str(&golden)) {
        (Ok(a), Ok(b)) => json_close(&a, &b, 1e-8, 1e-9, "$").map_err(|e| e.to_string()),
        _ => Err("unparseable output or golden".into()),
    };
    let unknown = workbench(&["check", "--suite", "nope"]);
    let exit2 = unknown.status.code() == Some(2) && unknown.stdout.is_empty();
    let mut strict = vec!["check", "--suite", "ybe", "--tol", "1e-30"];
    strict.extend_from_slice(CONFIG_A);
    let failing = workbench(&strict);
    let exit1 = failing.status.code() == Some(1) && !failing.stdout.is_empty();
    Outcome {
        pass: identical && exit0 && matches.is_ok() && exit2 && exit1,
        detail: format!(
            "byte-identical {identical}, exit 0 {exit0}, golden {}, unknown suite exit 2 {exit2}, failing check exit 1 {exit1}",
            matches.err().unwrap_or_else(|| "match".into())
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 8] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
    ];
    let mut all = true;
    for (n, f) in criteria {
        let o = f();
        all &= o.pass;
        println!("criterion {n}: {} {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
