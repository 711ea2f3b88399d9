//! Run configuration: flags, optional JSON file, defaults and validation.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use workbench_core::sampling::Sampler;
use workbench_core::{c64, BoundaryParams, ModelParams, SpinLabel};

use crate::CliError;

/// Parses `re`, `re+imi`, `re-imi` or `imi`.
pub fn parse_complex(s: &str) -> Result<c64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex number '{s}'");
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return f64::from_str(&t).map(|re| c64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re = f64::from_str(re).map_err(|_| bad())?;
    let im = f64::from_str(im.trim_start_matches('+')).map_err(|_| bad())?;
    Ok(c64::new(re, im))
}

/// Inverse of [`parse_complex`], shortest round-trip digits.
pub fn format_complex(z: c64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 || z.im.is_sign_negative() {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// θ as given on the command line or in a file.
#[derive(Clone, Debug, PartialEq)]
pub enum ThetaSpec {
    Zero,
    Values(Vec<c64>),
}

impl FromStr for ThetaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.trim() == "zero" {
            return Ok(Self::Zero);
        }
        s.split(',').map(parse_complex).collect::<Result<Vec<_>, _>>().map(Self::Values)
    }
}

/// Optional settings shared by flags and the JSON config file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub spin: Option<String>,
    pub sites: Option<usize>,
    pub eta: Option<String>,
    pub p: Option<String>,
    pub q: Option<String>,
    pub xi: Option<String>,
    pub varsigma: Option<String>,
    /// Comma list, `"zero"`, or a JSON array of strings.
    pub theta: Option<ThetaField>,
    pub samples: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ThetaField {
    Text(String),
    List(Vec<String>),
}

impl ThetaField {
    fn spec(&self) -> Result<ThetaSpec, String> {
        match self {
            Self::Text(s) => s.parse(),
            Self::List(v) => v.iter().map(|s| parse_complex(s)).collect::<Result<_, _>>().map(ThetaSpec::Values),
        }
    }
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Fields of `self` win over `base`.
    pub fn over(self, base: PartialConfig) -> PartialConfig {
        PartialConfig {
            spin: self.spin.or(base.spin),
            sites: self.sites.or(base.sites),
            eta: self.eta.or(base.eta),
            p: self.p.or(base.p),
            q: self.q.or(base.q),
            xi: self.xi.or(base.xi),
            varsigma: self.varsigma.or(base.varsigma),
            theta: self.theta.or(base.theta),
            samples: self.samples.or(base.samples),
            tol: self.tol.or(base.tol),
            seed: self.seed.or(base.seed),
        }
    }
}

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_SITES: usize = 2;

/// Fully resolved, validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub params: ModelParams,
    pub samples: usize,
    pub tol: Option<f64>,
    pub seed: u64,
    /// Whether θ was given as `zero`.
    pub homogeneous: bool,
}

/// Echo of the configuration as written into reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub spin: String,
    pub sites: usize,
    pub eta: String,
    pub p: String,
    pub q: String,
    pub xi: String,
    pub varsigma: String,
    pub theta: Vec<String>,
    pub samples: usize,
    pub tol: Option<f64>,
    pub seed: u64,
}

fn complex_or(field: &Option<String>, default: f64, name: &str) -> Result<c64, CliError> {
    match field {
        Some(s) => parse_complex(s).map_err(|e| CliError::Usage(format!("--{name}: {e}"))),
        None => Ok(c64::new(default, 0.0)),
    }
}

/// Random θ in `[−0.4, 0.4]`, rounded to four decimals, redrawn until generic.
fn seeded_theta(seed: u64, base: &ModelParams) -> Result<Vec<c64>, CliError> {
    let mut s = Sampler::new(seed);
    for _ in 0..1000 {
        let theta: Vec<c64> = (0..base.sites())
            .map(|_| c64::new((s.uniform(-0.4, 0.4) * 1e4).round() / 1e4, 0.0))
            .collect();
        let p = ModelParams { theta, ..base.clone() };
        if p.check_generic().is_ok() {
            return Ok(p.theta);
        }
    }
    Err(CliError::Usage("could not draw generic inhomogeneities".into()))
}

impl RunConfig {
    pub fn resolve(cfg: PartialConfig) -> Result<Self, CliError> {
        let spin: SpinLabel = match &cfg.spin {
            Some(s) => s.parse().map_err(|e| CliError::Usage(format!("--spin: {e}")))?,
            None => SpinLabel::HALF,
        };
        let eta = complex_or(&cfg.eta, 1.0, "eta")?;
        let boundary = BoundaryParams::new(
            complex_or(&cfg.p, 0.8, "p")?,
            complex_or(&cfg.varsigma, 0.0, "varsigma")?,
            complex_or(&cfg.q, 1.2, "q")?,
            complex_or(&cfg.xi, 0.6, "xi")?,
        );
        let theta = match &cfg.theta {
            Some(t) => Some(t.spec().map_err(|e| CliError::Usage(format!("--theta: {e}")))?),
            None => None,
        };
        let sites = match (&theta, cfg.sites) {
            (Some(ThetaSpec::Values(v)), Some(n)) if v.len() != n => {
                return Err(CliError::Usage(format!("--theta has {} entries but --sites is {n}", v.len())));
            }
            (Some(ThetaSpec::Values(v)), _) => v.len(),
            (_, Some(n)) => n,
            _ => DEFAULT_SITES,
        };
        let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
        let zeros = vec![c64::new(0.0, 0.0); sites];
        let base = ModelParams::new(spin, eta, boundary, zeros.clone()).map_err(|e| CliError::Usage(e.to_string()))?;
        let homogeneous = theta == Some(ThetaSpec::Zero);
        let theta = match theta {
            Some(ThetaSpec::Zero) => zeros,
            Some(ThetaSpec::Values(v)) => v,
            None => seeded_theta(seed, &base)?,
        };
        let params = ModelParams::new(spin, eta, boundary, theta).map_err(|e| CliError::Usage(e.to_string()))?;
        if !homogeneous {
            params.check_generic().map_err(|e| CliError::Usage(e.to_string()))?;
        }
        if let Some(t) = cfg.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        Ok(Self {
            params,
            samples: cfg.samples.unwrap_or(0),
            tol: cfg.tol,
            seed,
            homogeneous,
        })
    }

    pub fn echo(&self) -> ConfigEcho {
        let p = &self.params;
        ConfigEcho {
            spin: p.spin.to_string(),
            sites: p.sites(),
            eta: format_complex(p.eta),
            p: format_complex(p.boundary.p),
            q: format_complex(p.boundary.q),
            xi: format_complex(p.boundary.xi),
            varsigma: format_complex(p.boundary.varsigma),
            theta: p.theta.iter().map(|&t| format_complex(t)).collect(),
            samples: self.samples,
            tol: self.tol,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.8").unwrap(), c64::new(0.8, 0.0));
        assert_eq!(parse_complex("0.8+0.1i").unwrap(), c64::new(0.8, 0.1));
        assert_eq!(parse_complex("-1-2.5i").unwrap(), c64::new(-1.0, -2.5));
        assert_eq!(parse_complex("1e-3-2e-2i").unwrap(), c64::new(1e-3, -2e-2));
        assert_eq!(parse_complex("0.5i").unwrap(), c64::new(0.0, 0.5));
        assert_eq!(parse_complex("-i").unwrap(), c64::new(0.0, -1.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        for z in [c64::new(0.31, 0.0), c64::new(-0.2, 1.5), c64::new(1.0, -3e-7)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
    }

    #[test]
    fn theta_spec() {
        assert_eq!("zero".parse::<ThetaSpec>().unwrap(), ThetaSpec::Zero);
        assert_eq!(
            "0.31,-0.17".parse::<ThetaSpec>().unwrap(),
            ThetaSpec::Values(vec![c64::new(0.31, 0.0), c64::new(-0.17, 0.0)])
        );
    }

    #[test]
    fn flags_win_over_file() {
        let file: PartialConfig = serde_json::from_str(r#"{"spin":"1","sites":3,"xi":"0.2"}"#).unwrap();
        let flags = PartialConfig {
            sites: Some(2),
            ..Default::default()
        };
        let merged = flags.over(file);
        assert_eq!(merged.sites, Some(2));
        assert_eq!(merged.spin.as_deref(), Some("1"));
        let cfg = RunConfig::resolve(merged).unwrap();
        assert_eq!(cfg.params.sites(), 2);
        assert_eq!(cfg.params.boundary.xi, c64::new(0.2, 0.0));
    }

    #[test]
    fn seeded_theta_is_deterministic_and_generic() {
        let a = RunConfig::resolve(PartialConfig { sites: Some(3), ..Default::default() }).unwrap();
        let b = RunConfig::resolve(PartialConfig { sites: Some(3), ..Default::default() }).unwrap();
        assert_eq!(a.params.theta, b.params.theta);
        assert!(a.params.check_generic().is_ok());
    }

    #[test]
    fn rejects_bad_input() {
        let mismatch = PartialConfig {
            sites: Some(3),
            theta: Some(ThetaField::Text("0.1,0.2".into())),
            ..Default::default()
        };
        assert!(matches!(RunConfig::resolve(mismatch), Err(CliError::Usage(_))));
        let too_big = PartialConfig {
            spin: Some("3/2".into()),
            sites: Some(8),
            ..Default::default()
        };
        assert!(matches!(RunConfig::resolve(too_big), Err(CliError::Usage(_))));
        let unknown: Result<PartialConfig, _> = serde_json::from_str(r#"{"spins":"1"}"#);
        assert!(unknown.is_err());
    }
}
