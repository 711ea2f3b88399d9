//! Rational SU(2) R-matrices: the fundamental one, the spin-(1/2, s) one in
//! direct and fused form, spin-(j, s) by auxiliary fusion, and the spin-(s, s)
//! projector form.

use crate::error::{Result, WorkbenchError};
use crate::linalg::{c64, cr, embed_op, kron, rel_diff, swap_operator, CMatrix};
use crate::spin::{spin_matrices, symmetric_isometry, SpinLabel};

/// Distance below which a denominator is treated as vanishing.
pub(crate) const POLE_EPS: f64 = 1e-12;

pub(crate) fn check_pole(what: impl FnOnce() -> String, value: c64, at: c64, scale: f64) -> Result<()> {
    if value.norm() <= POLE_EPS * scale.max(1.0) {
        return Err(WorkbenchError::Pole { what: what(), at });
    }
    Ok(())
}

/// `u·I + η·P` on `C² ⊗ C²`.
pub fn r_half_half(u: c64, eta: c64) -> CMatrix {
    let mut r = swap_operator(2, 2).scale(eta);
    for i in 0..4 {
        r[(i, i)] += u;
    }
    r
}

/// `[[u + η/2 + ηSᶻ, ηS⁻], [ηS⁺, u + η/2 − ηSᶻ]]` on `C² ⊗ C^{2s+1}`.
pub fn r_half_s_direct(u: c64, s: SpinLabel, eta: c64) -> CMatrix {
    let d = s.dim();
    let sm = spin_matrices(s);
    let shift = u + eta * 0.5;
    let mut r = CMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        for k in 0..d {
            let id = if i == k { shift } else { cr(0.0) };
            r[(i, k)] = id + eta * sm.sz[(i, k)];
            r[(i, d + k)] = eta * sm.sm[(i, k)];
            r[(d + i, k)] = eta * sm.sp[(i, k)];
            r[(d + i, d + k)] = id - eta * sm.sz[(i, k)];
        }
    }
    r
}

/// Spin-(1/2, s) R-matrix built from `2s` fundamental ones fused in the
/// quantum space and compressed onto the spin-s subspace.
///
/// Fails with a pole error where the normalizing prefactor vanishes.
pub fn r_half_s_fused(u: c64, s: SpinLabel, eta: c64) -> Result<CMatrix> {
    let m = s.twice() as usize;
    let sv = s.value();
    let mut pref = cr(1.0);
    for k in 1..m {
        let f = u + eta * (0.5 - sv + k as f64);
        check_pole(
            || format!("spin-(1/2,{s}) fusion prefactor factor k={k}"),
            f,
            u,
            eta.norm(),
        )?;
        pref *= f;
    }
    let dims = vec![2usize; m + 1];
    let mut prod = CMatrix::identity(1 << (m + 1));
    for k in 1..=m {
        let rk = r_half_half(u + eta * (k as f64 - 0.5 - sv), eta);
        prod = prod.matmul(&embed_op(&rk, &[0, k], &dims)?);
    }
    let w = kron(&CMatrix::identity(2), &symmetric_isometry(m))?;
    Ok(w.transpose().matmul(&prod).matmul(&w).scale(pref.inv()))
}

/// Spin-(j, s) R-matrix on `C^{2j+1} ⊗ C^{2s+1}`, fused in the auxiliary
/// space from `2j` shifted spin-(1/2, s) R-matrices.
pub fn r_j_s_fused(u: c64, j: SpinLabel, s: SpinLabel, eta: c64) -> Result<CMatrix> {
    if j.twice() == 1 {
        return Ok(r_half_s_direct(u, s, eta));
    }
    let m = j.twice() as usize;
    let jv = j.value();
    let ds = s.dim();
    let mut dims = vec![2usize; m];
    dims.push(ds);
    let dim = (1usize << m) * ds;
    let mut prod = CMatrix::identity(dim);
    for k in 1..=m {
        let rk = r_half_s_direct(u + eta * (k as f64 - jv - 0.5), s, eta);
        prod = prod.matmul(&embed_op(&rk, &[k - 1, m], &dims)?);
    }
    let w = kron(&symmetric_isometry(m), &CMatrix::identity(ds))?;
    Ok(w.transpose().matmul(&prod).matmul(&w))
}

/// Projector of `V_s ⊗ V_s` onto total spin `l`.
pub fn projector_spin_l(l: u32, s: SpinLabel) -> Result<CMatrix> {
    let tw = s.twice();
    if l > tw {
        return Err(WorkbenchError::InvalidParams(format!(
            "total spin {l} exceeds 2s = {tw}"
        )));
    }
    let casimir = total_casimir(s)?;
    let n = casimir.rows();
    let ll = (l * (l + 1)) as f64;
    let mut p = CMatrix::identity(n);
    for jj in (0..=tw).filter(|&jj| jj != l) {
        let jc = (jj * (jj + 1)) as f64;
        let mut f = casimir.clone();
        for i in 0..n {
            f[(i, i)] -= cr(jc);
        }
        p = p.matmul(&f).scale(cr(1.0 / (ll - jc)));
    }
    Ok(p)
}

/// `(S₁ + S₂)²` on `V_s ⊗ V_s`.
fn total_casimir(s: SpinLabel) -> Result<CMatrix> {
    let d = s.dim();
    let sm = spin_matrices(s);
    let id = CMatrix::identity(d);
    let lift = |a: &CMatrix| -> Result<CMatrix> { Ok(&kron(a, &id)? + &kron(&id, a)?) };
    let z = lift(&sm.sz)?;
    let p = lift(&sm.sp)?;
    let m = lift(&sm.sm)?;
    // S² = Sᶻ² + (S⁺S⁻ + S⁻S⁺)/2
    let mut c = z.matmul(&z);
    c.axpy(cr(0.5), &p.matmul(&m));
    c.axpy(cr(0.5), &m.matmul(&p));
    Ok(c)
}

/// Spin-(s, s) R-matrix in projector form, with the ratio of linear factors
/// multiplied out so it is polynomial in `u`.
pub fn r_s_s_direct(u: c64, s: SpinLabel, eta: c64) -> Result<CMatrix> {
    let tw = s.twice();
    let d = s.dim();
    let mut r = CMatrix::zeros(d * d, d * d);
    for l in 0..=tw {
        let mut c = cr(1.0);
        for jj in (l + 1)..=tw {
            c *= u - eta * jj as f64;
        }
        for k in 1..=l {
            c *= u + eta * k as f64;
        }
        r.axpy(c, &projector_spin_l(l, s)?);
    }
    Ok(r)
}

/// Relative Yang–Baxter defect
/// `R₁₂(u−v) R₁₃(u) R₂₃(v) − R₂₃(v) R₁₃(u) R₁₂(u−v)` for spins `(s1, s2, s3)`.
pub fn ybe_residual(
    s1: SpinLabel,
    s2: SpinLabel,
    s3: SpinLabel,
    u: c64,
    v: c64,
    eta: c64,
) -> Result<f64> {
    let dims = [s1.dim(), s2.dim(), s3.dim()];
    let r12 = embed_op(&r_j_s_fused(u - v, s1, s2, eta)?, &[0, 1], &dims)?;
    let r13 = embed_op(&r_j_s_fused(u, s1, s3, eta)?, &[0, 2], &dims)?;
    let r23 = embed_op(&r_j_s_fused(v, s2, s3, eta)?, &[1, 2], &dims)?;
    let lhs = r12.matmul(&r13).matmul(&r23);
    let rhs = r23.matmul(&r13).matmul(&r12);
    Ok(rel_diff(&lhs, &rhs))
}

/// Scalar `ρ` with `r_s_s_direct(u) = ρ · r_j_s_fused(u, s, s)`, read from the
/// largest entry, together with the relative defect of that proportionality.
pub fn r_s_s_fusion_ratio(u: c64, s: SpinLabel, eta: c64) -> Result<(c64, f64)> {
    let direct = r_s_s_direct(u, s, eta)?;
    let fused = r_j_s_fused(u, s, s, eta)?;
    let (mut bi, mut best) = (0usize, 0.0);
    for (i, z) in fused.as_slice().iter().enumerate() {
        if z.norm() > best {
            best = z.norm();
            bi = i;
        }
    }
    let ratio = direct.as_slice()[bi] / fused.as_slice()[bi];
    Ok((ratio, rel_diff(&direct, &fused.scale(ratio))))
}
