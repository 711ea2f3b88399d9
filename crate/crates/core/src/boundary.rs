//! Reflection matrices `K⁻`, their fused spin-j versions, and the dual
//! matrices `K⁺` with the normalization `f^(j)`.

use crate::error::{Result, WorkbenchError};
use crate::linalg::{c64, cr, embed_op, kron, rel_diff, CMatrix};
use crate::rmatrix::{check_pole, r_half_half, r_j_s_fused};
use crate::spin::{symmetric_isometry, SpinLabel};

/// Boundary parameters: `(p, ς)` for the right end, `(q, ξ)` for the left.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryParams {
    pub p: c64,
    pub varsigma: c64,
    pub q: c64,
    pub xi: c64,
}

impl BoundaryParams {
    pub fn new(p: c64, varsigma: c64, q: c64, xi: c64) -> Self {
        Self { p, varsigma, q, xi }
    }

    /// The `(q, −ξ)` parameters that turn `K⁻` into the unnormalized `K⁺`.
    fn dual_minus(&self) -> (c64, c64) {
        (self.q, -self.xi)
    }

    pub fn is_finite(&self) -> bool {
        [self.p, self.varsigma, self.q, self.xi]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `[[p + u, ςu], [ςu, p − u]]`.
pub fn k_minus_half(u: c64, p: c64, varsigma: c64) -> CMatrix {
    CMatrix::from_2x2(p + u, varsigma * u, varsigma * u, p - u)
}

/// `[[q − u − η, ξ(u + η)], [ξ(u + η), q + u + η]]`.
pub fn k_plus_half(u: c64, q: c64, xi: c64, eta: c64) -> CMatrix {
    let w = u + eta;
    CMatrix::from_2x2(q - w, xi * w, xi * w, q + w)
}

/// Spin-j reflection matrix from `2j` shifted spin-1/2 ones interleaved with
/// fundamental R-matrices at `2u + (k + l − 2j − 1)η`, compressed onto the
/// symmetric subspace.
pub fn k_minus_fused(u: c64, j: SpinLabel, p: c64, varsigma: c64, eta: c64) -> Result<CMatrix> {
    let m = j.twice() as usize;
    let jv = j.value();
    if m == 1 {
        return Ok(k_minus_half(u, p, varsigma));
    }
    let dims = vec![2usize; m];
    let mut prod = CMatrix::identity(1 << m);
    for k in 1..=m {
        for l in 1..k {
            let r = r_half_half(u * 2.0 + eta * (k as f64 + l as f64 - m as f64 - 1.0), eta);
            prod = prod.matmul(&embed_op(&r, &[l - 1, k - 1], &dims)?);
        }
        let kk = k_minus_half(u + eta * (k as f64 - jv - 0.5), p, varsigma);
        prod = prod.matmul(&embed_op(&kk, &[k - 1], &dims)?);
    }
    let v = symmetric_isometry(m);
    Ok(v.transpose().matmul(&prod).matmul(&v))
}

/// `φ(u) = (u + η)(u − η)`.
pub fn phi(u: c64, eta: c64) -> c64 {
    (u + eta) * (u - eta)
}

/// `f^(j)(u) = Π_{l=1}^{2j−1} Π_{k=1}^{l} [−φ(2u + (l + k + 1 − 2j)η)]`.
pub fn f_norm(u: c64, j: SpinLabel, eta: c64) -> c64 {
    let tw = j.twice() as i64;
    let mut f = cr(1.0);
    for l in 1..tw {
        for k in 1..=l {
            f *= -phi(u * 2.0 + eta * (l + k + 1 - tw) as f64, eta);
        }
    }
    f
}

/// `K⁻^(j)(−u − η)` with `(p, ς) → (q, −ξ)`: the dual matrix before dividing
/// by `f^(j)(u)`. It has no poles.
pub fn k_plus_unnormalized(u: c64, j: SpinLabel, b: &BoundaryParams, eta: c64) -> Result<CMatrix> {
    let (q, mxi) = b.dual_minus();
    k_minus_fused(-u - eta, j, q, mxi, eta)
}

/// Dual reflection matrix `K⁺^(j)(u)`.
pub fn k_plus(u: c64, j: SpinLabel, b: &BoundaryParams, eta: c64) -> Result<CMatrix> {
    let f = f_norm(u, j, eta);
    let scale = eta.norm().powi(2 * (j.twice() as i32 - 1).max(0)) * (j.twice() as f64);
    check_pole(|| format!("f^({j}) normalization"), f, u, scale)?;
    Ok(k_plus_unnormalized(u, j, b, eta)?.scale(f.inv()))
}

/// Relative defect of the reflection equation for spins `(j, s)`:
/// `R(u−v) K⁻_a(u) R(u+v) K⁻_b(v) = K⁻_b(v) R(u+v) K⁻_a(u) R(u−v)`,
/// with every R the spin-(j, s) matrix on `V_a ⊗ V_b`.
pub fn reflection_residual(
    j: SpinLabel,
    s: SpinLabel,
    u: c64,
    v: c64,
    p: c64,
    varsigma: c64,
    eta: c64,
) -> Result<f64> {
    let ka = kron(&k_minus_fused(u, j, p, varsigma, eta)?, &CMatrix::identity(s.dim()))?;
    let kb = kron(&CMatrix::identity(j.dim()), &k_minus_fused(v, s, p, varsigma, eta)?)?;
    let rm = r_j_s_fused(u - v, j, s, eta)?;
    let rp = r_j_s_fused(u + v, j, s, eta)?;
    let lhs = rm.matmul(&ka).matmul(&rp).matmul(&kb);
    let rhs = kb.matmul(&rp).matmul(&ka).matmul(&rm);
    Ok(rel_diff(&lhs, &rhs))
}

/// Relative defect of the dual reflection equation:
/// `R(−u+v) K⁺_a(u) R(−u−v−2η) K⁺_b(v) = K⁺_b(v) R(−u−v−2η) K⁺_a(u) R(−u+v)`.
pub fn dual_reflection_residual(
    j: SpinLabel,
    s: SpinLabel,
    u: c64,
    v: c64,
    b: &BoundaryParams,
    eta: c64,
) -> Result<f64> {
    let ka = kron(&k_plus(u, j, b, eta)?, &CMatrix::identity(s.dim()))?;
    let kb = kron(&CMatrix::identity(j.dim()), &k_plus(v, s, b, eta)?)?;
    let rm = r_j_s_fused(v - u, j, s, eta)?;
    let rp = r_j_s_fused(-u - v - eta * 2.0, j, s, eta)?;
    let lhs = rm.matmul(&ka).matmul(&rp).matmul(&kb);
    let rhs = kb.matmul(&rp).matmul(&ka).matmul(&rm);
    Ok(rel_diff(&lhs, &rhs))
}

/// Checks that a matrix is a scalar multiple of the identity and returns the
/// scalar.
pub fn identity_scalar(m: &CMatrix) -> Result<(c64, f64)> {
    if !m.is_square() {
        return Err(WorkbenchError::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let n = m.rows();
    let c = m.trace() / n as f64;
    Ok((c, rel_diff(m, &CMatrix::scalar(n, c))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(t: u32) -> SpinLabel {
        SpinLabel::from_twice(t).unwrap()
    }

    const ETA: c64 = c64 { re: 1.0, im: 0.0 };

    fn params(varsigma: f64) -> BoundaryParams {
        BoundaryParams::new(cr(0.8), cr(varsigma), cr(1.2), cr(0.6))
    }

    #[test]
    fn half_minus_basics() {
        let p = c64::new(0.8, 0.1);
        let vs = c64::new(0.3, -0.2);
        assert_eq!(k_minus_half(cr(0.0), p, vs), CMatrix::scalar(2, p));
        let u = c64::new(0.41, 0.77);
        let k = k_minus_half(u, p, vs);
        assert!((k.trace() - p * 2.0).norm() < 1e-15);
        let det = k[(0, 0)] * k[(1, 1)] - k[(0, 1)] * k[(1, 0)];
        let want = p * p - u * u * (vs * vs + 1.0);
        assert!((det - want).norm() < 1e-14);
    }

    #[test]
    fn half_plus_is_substituted_minus() {
        let b = BoundaryParams::new(cr(0.8), cr(0.3), c64::new(1.2, 0.1), c64::new(0.6, -0.2));
        assert_eq!(k_plus_half(-ETA, b.q, b.xi, ETA), CMatrix::scalar(2, b.q));
        for u in [c64::new(0.3, 0.2), c64::new(-1.1, 0.5)] {
            let want = k_minus_half(-u - ETA, b.q, -b.xi);
            assert!((&k_plus_half(u, b.q, b.xi, ETA) - &want).max_abs() < 1e-15);
            assert!((&k_plus(u, SpinLabel::HALF, &b, ETA).unwrap() - &want).max_abs() < 1e-15);
        }
    }

    #[test]
    fn f_norm_values() {
        let u = c64::new(0.31, 0.12);
        assert_eq!(f_norm(u, SpinLabel::HALF, ETA), cr(1.0));
        // Single factor l = k = 1 with 2j = 2: −φ(2u + η).
        assert!((f_norm(u, sp(2), ETA) + phi(u * 2.0 + ETA, ETA)).norm() < 1e-14);
        let mut naive = cr(1.0);
        for (l, k) in [(1, 1), (2, 1), (2, 2)] {
            naive *= -phi(u * 2.0 + ETA * (l + k + 1 - 3) as f64, ETA);
        }
        assert!((f_norm(u, sp(3), ETA) - naive).norm() < 1e-14 * naive.norm());
    }

    #[test]
    fn fused_half_is_fundamental() {
        let u = c64::new(0.2, -0.3);
        assert_eq!(k_minus_fused(u, SpinLabel::HALF, cr(0.8), cr(0.3), ETA).unwrap(), k_minus_half(u, cr(0.8), cr(0.3)));
    }

    #[test]
    fn reflection_equation_all_pairs() {
        let (u, v) = (c64::new(0.31, 0.1), c64::new(-0.22, 0.05));
        for vs in [0.0, 0.3] {
            for j in 1..=3 {
                for s in 1..=3 {
                    let r = reflection_residual(sp(j), sp(s), u, v, cr(0.8), cr(vs), ETA).unwrap();
                    assert!(r < 1e-10, "({j},{s}) ς={vs}: {r:e}");
                }
            }
        }
    }

    #[test]
    fn dual_reflection_equation_all_pairs() {
        let (u, v) = (c64::new(0.31, 0.1), c64::new(-0.22, 0.05));
        let b = params(0.3);
        for j in 1..=3 {
            for s in 1..=3 {
                let r = dual_reflection_residual(sp(j), sp(s), u, v, &b, ETA).unwrap();
                assert!(r < 1e-10, "({j},{s}): {r:e}");
            }
        }
    }

    #[test]
    fn fused_minus_at_zero_diagonal_boundary() {
        let k1 = k_minus_fused(cr(0.0), sp(2), cr(0.8), cr(0.0), ETA).unwrap();
        let (c, defect) = identity_scalar(&k1).unwrap();
        assert!(defect < 1e-14);
        assert!(c.norm() > 1e-3);
        // For 2j = 3 the value at u = 0 vanishes identically.
        let k3 = k_minus_fused(cr(0.0), sp(3), cr(0.8), cr(0.0), ETA).unwrap();
        assert!(k3.max_abs() < 1e-13);
    }

    #[test]
    fn fused_plus_at_minus_eta() {
        // f^(1) vanishes at u = −η, so only the unnormalized dual is finite
        // there; with ξ = 0 it is a multiple of the identity.
        let b = BoundaryParams::new(cr(0.8), cr(0.0), cr(1.2), cr(0.0));
        assert!(matches!(k_plus(-ETA, sp(2), &b, ETA), Err(WorkbenchError::Pole { .. })));
        let k = k_plus_unnormalized(-ETA, sp(2), &b, ETA).unwrap();
        let (c, defect) = identity_scalar(&k).unwrap();
        assert!(defect < 1e-14);
        assert!(c.norm() > 1e-3);
    }

    #[test]
    fn plus_pole_reported() {
        // f^(1)(u) = −φ(2u + η) vanishes at u = 0.
        let err = k_plus(cr(0.0), sp(2), &params(0.0), ETA).unwrap_err();
        assert!(matches!(err, WorkbenchError::Pole { .. }));
    }
}
