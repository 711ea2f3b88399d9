//! Report types and their JSON / CSV serialization.

use std::io::Write;
use std::path::Path;

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use workbench_core::c64;

use crate::config::ConfigEcho;
use crate::CliError;

/// A float written with 17 significant digits; non-finite values become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Num(pub f64);

impl Num {
    pub fn text(self) -> String {
        if self.0.is_finite() {
            format!("{:.16e}", self.0)
        } else {
            "null".to_string()
        }
    }
}

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(self.text()).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Num(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

pub fn pair(z: c64) -> [Num; 2] {
    [Num(z.re), Num(z.im)]
}

/// One executed check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub anchor: String,
    pub residual: Num,
    pub tol: Num,
    pub pass: bool,
}

impl CheckRecord {
    /// Passes when `residual < tol`; NaN never passes.
    pub fn new(name: impl Into<String>, anchor: &str, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            anchor: anchor.to_string(),
            residual: Num(residual),
            tol: Num(tol),
            pass: residual < tol,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, anchor: &str, tol: f64) -> Self {
        Self::new(name, anchor, f64::NAN, tol)
    }
}

/// Per-eigenstate summary of the Bethe pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetheRecord {
    pub eigen_index: usize,
    /// Transfer-matrix eigenvalue at the reference point.
    pub eigenvalue: [Num; 2],
    pub roots: Vec<[Num; 2]>,
    pub bae_residuals: Vec<Num>,
    pub tq_residual: Num,
    pub held_out_residual: Num,
    pub fidelity: Num,
    pub eigen_residual: Num,
    pub normalized: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Eigenvalue of `t(u*)` from the spectrum command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub eigen_index: usize,
    pub reference: [Num; 2],
    pub eigenvalue: [Num; 2],
    pub residual: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spectrum: Vec<SpectrumRecord>,
    pub bethe: Vec<BetheRecord>,
}

impl Report {
    pub fn new(config: ConfigEcho) -> Self {
        Self {
            config,
            checks: Vec::new(),
            spectrum: Vec::new(),
            bethe: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass) && self.bethe.iter().all(|b| b.error.is_none())
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Usage(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    /// Check rows, or Bethe rows when `bethe_table` is set.
    pub fn to_csv(&self, bethe_table: bool) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Usage(e.to_string());
        if bethe_table {
            w.write_record(["eigen_index", "lambda_re", "lambda_im", "bae_residual", "fidelity"]).map_err(err)?;
            for b in &self.bethe {
                let bae = b.bae_residuals.iter().map(|n| n.0).fold(0.0, f64::max);
                w.write_record([
                    b.eigen_index.to_string(),
                    b.eigenvalue[0].text(),
                    b.eigenvalue[1].text(),
                    Num(bae).text(),
                    b.fidelity.text(),
                ])
                .map_err(err)?;
            }
        } else {
            w.write_record(["name", "anchor", "residual", "tol", "pass"]).map_err(err)?;
            for c in &self.checks {
                w.write_record([
                    c.name.clone(),
                    c.anchor.clone(),
                    c.residual.text(),
                    c.tol.text(),
                    c.pass.to_string(),
                ])
                .map_err(err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// Writes `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn echo() -> ConfigEcho {
        ConfigEcho {
            spin: "1/2".into(),
            sites: 1,
            eta: "1".into(),
            p: "0.8".into(),
            q: "1.2".into(),
            xi: "0.6".into(),
            varsigma: "0".into(),
            theta: vec!["0.31".into()],
            samples: 0,
            tol: None,
            seed: 42,
        }
    }

    #[test]
    fn empty_report_has_empty_checks() {
        let r = Report::new(echo());
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["checks"], serde_json::json!([]));
        assert_eq!(v["bethe"], serde_json::json!([]));
    }

    #[test]
    fn seventeen_digits_and_round_trip() {
        let mut r = Report::new(echo());
        let x = 1.0 / 3.0 * 1e-11;
        r.checks.push(CheckRecord::new("a", "x", x, 1e-10));
        r.checks.push(CheckRecord::failed("b", "y", 1e-10));
        let text = r.to_json().unwrap();
        assert!(text.contains("3.3333333333333331e-12"));
        assert!(text.contains("\"residual\": null"));
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back.checks[0].residual.0, x);
        assert_eq!(back.to_json().unwrap(), text);
        assert!(!back.passed());
    }

    #[test]
    fn csv_headers() {
        let r = Report::new(echo());
        assert_eq!(
            r.to_csv(true).unwrap(),
            "eigen_index,lambda_re,lambda_im,bae_residual,fidelity\n"
        );
        assert_eq!(r.to_csv(false).unwrap(), "name,anchor,residual,tol,pass\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
