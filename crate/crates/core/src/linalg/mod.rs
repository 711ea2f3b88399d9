//! Dense complex linear algebra: matrices, tensor products, site embeddings,
//! eigen-decomposition, least squares and polynomial roots.

mod decomp;
mod matrix;
mod poly;

pub use decomp::{eigenpairs, inverse, lstsq, singular_values, EigenPair, Eigensystem, Lstsq};
pub use matrix::{CMatrix, CVector};
pub use num_complex::Complex64 as c64;
pub use poly::{poly_roots, Polynomial};

use crate::error::{Result, WorkbenchError};

/// Default cap on the quantum Hilbert-space dimension.
pub const DEFAULT_MAX_DIM: usize = 1024;

/// Operators may carry auxiliary factors on top of the quantum space; they are
/// allowed this multiple of the Hilbert cap.
const OPERATOR_CAP_FACTOR: usize = 16;

/// Hilbert-space dimension cap, overridable through `WORKBENCH_MAX_DIM`.
pub fn max_hilbert_dim() -> usize {
    std::env::var("WORKBENCH_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_DIM)
}

pub fn max_operator_dim() -> usize {
    max_hilbert_dim().saturating_mul(OPERATOR_CAP_FACTOR)
}

#[inline]
pub fn cr(x: f64) -> c64 {
    c64::new(x, 0.0)
}

fn check_operator_dim(dim: usize) -> Result<()> {
    let cap = max_operator_dim();
    if dim > cap {
        return Err(WorkbenchError::DimensionTooLarge { dim, cap });
    }
    Ok(())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) => (r, c),
        _ => {
            return Err(WorkbenchError::DimensionTooLarge {
                dim: usize::MAX,
                cap: max_operator_dim(),
            })
        }
    };
    check_operator_dim(rows.max(cols))?;
    let (br, bc) = (b.rows(), b.cols());
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    }))
}

/// Kronecker product of a list of matrices, left to right.
pub fn kron_all(ms: &[CMatrix]) -> Result<CMatrix> {
    let mut out = CMatrix::identity(1);
    for m in ms {
        out = kron(&out, m)?;
    }
    Ok(out)
}

/// `I^{⊗(n−1)} ⊗ op ⊗ I^{⊗(N−n)}` on `N` sites of local dimension `d`.
/// Sites are numbered from 1.
pub fn embed_site(op: &CMatrix, n: usize, sites: usize, d: usize) -> Result<CMatrix> {
    if n == 0 || n > sites {
        return Err(WorkbenchError::SiteOutOfRange { site: n, sites });
    }
    if op.rows() != d || op.cols() != d {
        return Err(WorkbenchError::DimensionMismatch {
            context: "embed_site operator",
            expected: d,
            found: op.rows().max(op.cols()),
        });
    }
    let total = checked_pow(d, sites)?;
    embed_op(op, &[n - 1], &vec![d; sites]).inspect(|m| {
        debug_assert_eq!(m.rows(), total);
    })
}

fn checked_pow(d: usize, n: usize) -> Result<usize> {
    let cap = max_operator_dim();
    let mut total: usize = 1;
    for _ in 0..n {
        total = total
            .checked_mul(d)
            .filter(|&t| t <= cap)
            .ok_or(WorkbenchError::DimensionTooLarge {
                dim: d.saturating_pow(n as u32),
                cap,
            })?;
    }
    Ok(total)
}

/// Embeds `op`, acting on the tensor factors listed in `positions` (in that
/// order), into the product space with factor dimensions `dims`.
pub fn embed_op(op: &CMatrix, positions: &[usize], dims: &[usize]) -> Result<CMatrix> {
    let local: usize = positions.iter().map(|&p| dims[p]).product();
    if op.rows() != local || op.cols() != local {
        return Err(WorkbenchError::DimensionMismatch {
            context: "embed_op operator",
            expected: local,
            found: op.rows(),
        });
    }
    let total: usize = dims.iter().product();
    check_operator_dim(total)?;
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let in_pos: Vec<bool> = (0..n).map(|k| positions.contains(&k)).collect();

    // Local multi-index of a global index restricted to `positions`, and the
    // global offset contributed by the remaining factors.
    let split = |g: usize| -> (usize, usize) {
        let mut loc = 0;
        for &p in positions {
            loc = loc * dims[p] + (g / strides[p]) % dims[p];
        }
        let mut rest = 0;
        for k in 0..n {
            if !in_pos[k] {
                rest += ((g / strides[k]) % dims[k]) * strides[k];
            }
        }
        (loc, rest)
    };
    let place = |loc: usize, rest: usize| -> usize {
        let mut g = rest;
        let mut l = loc;
        for &p in positions.iter().rev() {
            g += (l % dims[p]) * strides[p];
            l /= dims[p];
        }
        g
    };

    let mut out = CMatrix::zeros(total, total);
    for col in 0..total {
        let (lc, rest) = split(col);
        for lr in 0..local {
            let v = op[(lr, lc)];
            if v.re != 0.0 || v.im != 0.0 {
                out[(place(lr, rest), col)] = v;
            }
        }
    }
    Ok(out)
}

/// Permutation operator on `C^{d1} ⊗ C^{d2}` mapping `|i⟩⊗|j⟩` to `|j⟩⊗|i⟩`.
pub fn swap_operator(d1: usize, d2: usize) -> CMatrix {
    let mut p = CMatrix::zeros(d1 * d2, d1 * d2);
    for i in 0..d1 {
        for j in 0..d2 {
            p[(j * d1 + i, i * d2 + j)] = cr(1.0);
        }
    }
    p
}

/// Relative size of a defect, `‖a − b‖ / max(‖a‖, ‖b‖)`.
pub fn rel_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    let den = a.norm().max(b.norm());
    if den == 0.0 {
        return 0.0;
    }
    (a - b).norm() / den
}

/// Relative size of a vector defect, `‖a − b‖ / max(‖a‖, ‖b‖)`.
pub fn rel_diff_vec(a: &CVector, b: &CVector) -> f64 {
    let den = a.norm().max(b.norm());
    if den == 0.0 {
        return 0.0;
    }
    (a - b).norm() / den
}

/// Relative difference of two scalars.
pub fn rel_diff_scalar(a: c64, b: c64) -> f64 {
    let den = a.norm().max(b.norm());
    if den == 0.0 {
        return 0.0;
    }
    (a - b).norm() / den
}
