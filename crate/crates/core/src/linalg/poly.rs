use super::{c64, cr, CMatrix};
use crate::error::{Result, WorkbenchError};

/// Dense polynomial with complex coefficients in ascending degree.
///
/// Trailing zero coefficients are trimmed, so the leading coefficient is
/// nonzero unless the polynomial is zero (empty coefficient list).
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<c64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<c64>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::new(vec![cr(1.0)])
    }

    /// Monic polynomial `Π (x − rᵢ)`.
    pub fn from_roots(roots: &[c64]) -> Self {
        let mut c = vec![cr(1.0)];
        for &r in roots {
            let mut next = vec![c64::new(0.0, 0.0); c.len() + 1];
            for (k, &a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[c64] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> c64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, x: c64) -> c64 {
        self.coeffs
            .iter()
            .rev()
            .fold(c64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let mut c = vec![c64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }
}

const POLISH_STEPS: usize = 8;

/// All `degree` roots of `p`, from the companion-matrix eigenvalues followed by
/// a few Newton polishing steps on each root.
pub fn poly_roots(p: &Polynomial) -> Result<Vec<c64>> {
    let n = match p.degree() {
        None | Some(0) => return Err(WorkbenchError::DegreeZero),
        Some(n) => n,
    };
    let lead = p.leading();
    let monic: Vec<c64> = p.coeffs().iter().map(|&c| c / lead).collect();
    let mut comp = CMatrix::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = cr(1.0);
    }
    for i in 0..n {
        comp[(i, n - 1)] = -monic[i];
    }
    let mut roots = comp
        .to_faer()
        .eigenvalues()
        .map_err(|e| WorkbenchError::EigenFailure(format!("companion matrix: {e:?}")))?;

    let dp = p.derivative();
    for r in &mut roots {
        let mut best = p.eval(*r).norm();
        for _ in 0..POLISH_STEPS {
            let d = dp.eval(*r);
            if d.norm() == 0.0 {
                break;
            }
            let cand = *r - p.eval(*r) / d;
            let val = p.eval(cand).norm();
            if !(val < best) {
                break;
            }
            *r = cand;
            best = val;
        }
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}
