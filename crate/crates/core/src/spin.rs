//! Spin labels, spin-s operators, symmetrizers and the isometry onto the
//! symmetric subspace of `(C²)^{⊗m}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Result, WorkbenchError};
use crate::linalg::{cr, embed_op, swap_operator, CMatrix};

/// A spin `s ∈ {1/2, 1, 3/2, ...}`, stored as `2s` to keep it exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinLabel {
    twice: u32,
}

impl SpinLabel {
    pub const HALF: SpinLabel = SpinLabel { twice: 1 };

    pub fn from_twice(twice: u32) -> Result<Self> {
        if twice == 0 {
            return Err(WorkbenchError::InvalidParams("spin must be at least 1/2".into()));
        }
        Ok(Self { twice })
    }

    #[inline]
    pub fn twice(self) -> u32 {
        self.twice
    }

    #[inline]
    pub fn dim(self) -> usize {
        self.twice as usize + 1
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.twice as f64 / 2.0
    }

    /// The spin one half lower, or `None` below 1.
    pub fn lowered(self) -> Option<SpinLabel> {
        (self.twice > 1).then(|| SpinLabel { twice: self.twice - 1 })
    }

    pub fn raised(self) -> SpinLabel {
        SpinLabel { twice: self.twice + 1 }
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twice.is_multiple_of(2) {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for SpinLabel {
    type Err = WorkbenchError;

    /// Accepts `"1/2"`, `"1"`, `"3/2"`, ... and decimal forms such as `"1.5"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || WorkbenchError::InvalidParams(format!("cannot parse spin {s:?}"));
        let twice = if let Some((num, den)) = s.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| bad())?;
            match den.trim() {
                "2" => num,
                "1" => num.checked_mul(2).ok_or_else(bad)?,
                _ => return Err(bad()),
            }
        } else {
            let v: f64 = s.parse().map_err(|_| bad())?;
            let t = 2.0 * v;
            if !(t >= 1.0) || t.fract() != 0.0 || t > u32::MAX as f64 {
                return Err(bad());
            }
            t as u32
        };
        SpinLabel::from_twice(twice)
    }
}

/// `Sᶻ`, `S⁺`, `S⁻` in the basis `|s⟩, |s−1⟩, ..., |−s⟩`.
#[derive(Clone, Debug)]
pub struct SpinMatrices {
    pub sz: CMatrix,
    pub sp: CMatrix,
    pub sm: CMatrix,
}

pub fn spin_matrices(s: SpinLabel) -> SpinMatrices {
    let d = s.dim();
    let sv = s.value();
    let m = |i: usize| sv - i as f64;
    let sz = CMatrix::diag(&(0..d).map(|i| cr(m(i))).collect::<Vec<_>>());
    let mut sp = CMatrix::zeros(d, d);
    for i in 1..d {
        let k = m(i);
        sp[(i - 1, i)] = cr((sv * (sv + 1.0) - k * (k + 1.0)).sqrt());
    }
    let sm = sp.transpose();
    SpinMatrices { sz, sp, sm }
}

/// Symmetrizer on `(C²)^{⊗m}` from the ordered product
/// `(1/m!) Π_{k=1}^{m} (Σ_{l=1}^{k} P_{l,k})`, with `P_{k,k} = 1`.
pub fn sym_projector(m: usize) -> Result<CMatrix> {
    if m == 0 {
        return Err(WorkbenchError::InvalidParams("symmetrizer needs m >= 1".into()));
    }
    let dims = vec![2usize; m];
    let dim = 1usize << m;
    let swap = swap_operator(2, 2);
    let mut out = CMatrix::identity(dim);
    let mut fact = 1.0;
    for k in 1..=m {
        let mut sum = CMatrix::identity(dim);
        for l in 1..k {
            sum += &embed_op(&swap, &[l - 1, k - 1], &dims)?;
        }
        out = out.matmul(&sum);
        fact *= k as f64;
    }
    Ok(out.scale(cr(1.0 / fact)))
}

/// Isometry `V: C^{m+1} → (C²)^{⊗m}` onto the symmetric subspace.
///
/// Column `k` is the normalized sum of all basis strings with `k` down spins,
/// matching the spin-`m/2` basis `|m/2 − k⟩`. Bit 0 is up.
pub fn symmetric_isometry(m: usize) -> CMatrix {
    let dim = 1usize << m;
    let mut v = CMatrix::zeros(dim, m + 1);
    let mut counts = vec![0usize; m + 1];
    for b in 0..dim {
        let downs = b.count_ones() as usize;
        v[(b, downs)] = cr(1.0);
        counts[downs] += 1;
    }
    for b in 0..dim {
        let downs = b.count_ones() as usize;
        v[(b, downs)] = cr(1.0 / (counts[downs] as f64).sqrt());
    }
    v
}
