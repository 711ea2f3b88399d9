//! Model parameters, one- and double-row monodromy matrices, fused transfer
//! matrices, the Hamiltonian and the functional relations among them.

use crate::boundary::{f_norm, k_minus_fused, k_plus, k_plus_unnormalized, BoundaryParams};
use crate::error::{Result, WorkbenchError};
use crate::linalg::{
    c64, cr, embed_op, inverse, kron, max_hilbert_dim, rel_diff, CMatrix,
};
use crate::rmatrix::{check_pole, r_j_s_fused};
use crate::spin::SpinLabel;

/// Physical parameters of the chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub spin: SpinLabel,
    pub eta: c64,
    pub boundary: BoundaryParams,
    /// Inhomogeneities `θ₁ … θ_N`; their count fixes the number of sites.
    pub theta: Vec<c64>,
}

/// Minimal separation required between shifted inhomogeneities.
pub const GENERICITY_GAP: f64 = 1e-6;

impl ModelParams {
    /// Validates finiteness, `N ≥ 1`, `η ≠ 0` and the dimension cap.
    pub fn new(spin: SpinLabel, eta: c64, boundary: BoundaryParams, theta: Vec<c64>) -> Result<Self> {
        let p = Self { spin, eta, boundary, theta };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.theta.is_empty() {
            return Err(WorkbenchError::InvalidParams("the chain needs at least one site".into()));
        }
        let finite = |z: &c64| z.re.is_finite() && z.im.is_finite();
        if !finite(&self.eta) || !self.boundary.is_finite() || !self.theta.iter().all(finite) {
            return Err(WorkbenchError::InvalidParams("parameters must be finite".into()));
        }
        if self.eta.norm() == 0.0 {
            return Err(WorkbenchError::InvalidParams("eta must be nonzero".into()));
        }
        let cap = max_hilbert_dim();
        let mut dim: usize = 1;
        for _ in 0..self.theta.len() {
            dim = dim.saturating_mul(self.spin.dim());
            if dim > cap {
                return Err(WorkbenchError::DimensionTooLarge {
                    dim: self.spin.dim().saturating_pow(self.theta.len() as u32),
                    cap,
                });
            }
        }
        Ok(())
    }

    #[inline]
    pub fn sites(&self) -> usize {
        self.theta.len()
    }

    /// `(2s+1)^N`.
    pub fn hilbert_dim(&self) -> usize {
        self.spin.dim().pow(self.sites() as u32)
    }

    /// Same parameters with every `θ_l = 0`.
    pub fn homogeneous(&self) -> Self {
        Self {
            theta: vec![cr(0.0); self.sites()],
            ..self.clone()
        }
    }

    pub fn with_varsigma(&self, varsigma: c64) -> Self {
        let mut p = self.clone();
        p.boundary.varsigma = varsigma;
        p
    }

    /// Requires `θ_i ∓ θ_j` (for `i ≠ j`) to stay away from the lattice `kη`,
    /// `|k| ≤ 2s + 2`, so that shifted evaluation points never collide.
    pub fn check_generic(&self) -> Result<()> {
        let kmax = self.spin.twice() as i64 + 2;
        let scale = self.eta.norm().max(1.0);
        for i in 0..self.sites() {
            for j in (i + 1)..self.sites() {
                for k in -kmax..=kmax {
                    let shift = self.eta * k as f64;
                    for (label, z) in [
                        ("difference", self.theta[i] - self.theta[j] - shift),
                        ("sum", self.theta[i] + self.theta[j] - shift),
                    ] {
                        if z.norm() < GENERICITY_GAP * scale {
                            return Err(WorkbenchError::SingularConfiguration(format!(
                                "theta_{} and theta_{} are not generic ({label} hits {k}*eta)",
                                i + 1,
                                j + 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn require_diagonal_right_boundary(&self) -> Result<()> {
        if self.boundary.varsigma.norm() != 0.0 {
            return Err(WorkbenchError::Unsupported(
                "this construction requires varsigma = 0".into(),
            ));
        }
        Ok(())
    }
}

/// The spin chain with its operator constructions.
#[derive(Clone, Debug)]
pub struct Chain {
    params: ModelParams,
}

impl Chain {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Self { params })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn spin(&self) -> SpinLabel {
        self.params.spin
    }

    pub fn eta(&self) -> c64 {
        self.params.eta
    }

    pub fn sites(&self) -> usize {
        self.params.sites()
    }

    pub fn dim(&self) -> usize {
        self.params.hilbert_dim()
    }

    fn dims(&self, j: SpinLabel) -> Vec<usize> {
        let mut d = vec![j.dim()];
        d.extend(std::iter::repeat_n(self.spin().dim(), self.sites()));
        d
    }

    /// `T(u) = R_{a,N}(u − θ_N) ⋯ R_{a,1}(u − θ_1)` on `V_j ⊗ V_s^{⊗N}`.
    pub fn monodromy(&self, j: SpinLabel, u: c64) -> Result<CMatrix> {
        let dims = self.dims(j);
        let mut m = CMatrix::identity(j.dim() * self.dim());
        for n in (1..=self.sites()).rev() {
            let r = r_j_s_fused(u - self.params.theta[n - 1], j, self.spin(), self.eta())?;
            m = m.matmul(&embed_op(&r, &[0, n], &dims)?);
        }
        Ok(m)
    }

    /// `T̂(u) = R_{a,1}(u + θ_1) ⋯ R_{a,N}(u + θ_N)`.
    pub fn monodromy_hat(&self, j: SpinLabel, u: c64) -> Result<CMatrix> {
        self.monodromy_hat_ordered(j, u, false)
    }

    /// `T̂` with the factor order reversed, `R_{a,N}(u + θ_N) ⋯ R_{a,1}(u + θ_1)`.
    /// Kept to show that only the forward order yields a commuting family.
    pub fn monodromy_hat_reversed(&self, j: SpinLabel, u: c64) -> Result<CMatrix> {
        self.monodromy_hat_ordered(j, u, true)
    }

    fn monodromy_hat_ordered(&self, j: SpinLabel, u: c64, reversed: bool) -> Result<CMatrix> {
        let dims = self.dims(j);
        let mut m = CMatrix::identity(j.dim() * self.dim());
        let order: Vec<usize> = if reversed {
            (1..=self.sites()).rev().collect()
        } else {
            (1..=self.sites()).collect()
        };
        for n in order {
            let r = r_j_s_fused(u + self.params.theta[n - 1], j, self.spin(), self.eta())?;
            m = m.matmul(&embed_op(&r, &[0, n], &dims)?);
        }
        Ok(m)
    }

    /// `𝒰(u) = T(u) K⁻(u) T̂(u)`.
    pub fn double_row(&self, j: SpinLabel, u: c64) -> Result<CMatrix> {
        self.double_row_with(j, u, false)
    }

    fn double_row_with(&self, j: SpinLabel, u: c64, reversed_hat: bool) -> Result<CMatrix> {
        let b = &self.params.boundary;
        let km = k_minus_fused(u, j, b.p, b.varsigma, self.eta())?;
        let k = kron(&km, &CMatrix::identity(self.dim()))?;
        let hat = self.monodromy_hat_ordered(j, u, reversed_hat)?;
        Ok(self.monodromy(j, u)?.matmul(&k).matmul(&hat))
    }

    /// `t^(j,s)(u) = tr_a K⁺(u) 𝒰(u)`.
    pub fn transfer(&self, j: SpinLabel, u: c64) -> Result<CMatrix> {
        let kp = k_plus(u, j, &self.params.boundary, self.eta())?;
        self.trace_with(&kp, &self.double_row(j, u)?)
    }

    /// `t^(1/2,s)(u)`.
    pub fn transfer_half(&self, u: c64) -> Result<CMatrix> {
        self.transfer(SpinLabel::HALF, u)
    }

    /// Transfer matrix indexed by `2j`, with `t^(0,s) = id`.
    pub fn transfer_level(&self, twice_j: u32, u: c64) -> Result<CMatrix> {
        match twice_j {
            0 => Ok(CMatrix::identity(self.dim())),
            t => self.transfer(SpinLabel::from_twice(t)?, u),
        }
    }

    /// `t^(1/2,s)` built with the reversed `T̂` ordering.
    pub fn transfer_half_reversed_hat(&self, u: c64) -> Result<CMatrix> {
        let kp = k_plus(u, SpinLabel::HALF, &self.params.boundary, self.eta())?;
        self.trace_with(&kp, &self.double_row_with(SpinLabel::HALF, u, true)?)
    }

    /// `f^(j)(u) t^(j,s)(u)`, which has no poles in `u`.
    pub fn transfer_unnormalized(&self, j: SpinLabel, u: c64) -> Result<CMatrix> {
        let kp = k_plus_unnormalized(u, j, &self.params.boundary, self.eta())?;
        self.trace_with(&kp, &self.double_row(j, u)?)
    }

    fn trace_with(&self, kaux: &CMatrix, u_op: &CMatrix) -> Result<CMatrix> {
        let k = kron(kaux, &CMatrix::identity(self.dim()))?;
        Ok(k.matmul(u_op).partial_trace_first(kaux.rows()))
    }

    /// `δ^(s)(u)`, the quantum-determinant factor of the fusion hierarchy.
    pub fn delta(&self, u: c64) -> Result<c64> {
        let e = self.eta();
        let b = &self.params.boundary;
        let den = (u * 2.0 - e) * (u * 2.0 + e);
        check_pole(|| "delta denominator (2u - eta)(2u + eta)".into(), den, u, e.norm_sqr())?;
        let c = e * (0.5 + self.spin().value());
        let mut r = (u * 2.0 - e * 2.0) * (u * 2.0 + e * 2.0) / den
            * ((b.varsigma * b.varsigma + 1.0) * u * u - b.p * b.p)
            * ((b.xi * b.xi + 1.0) * u * u - b.q * b.q);
        for &th in &self.params.theta {
            r *= (u - th + c) * (u + th + c) * (u - th - c) * (u + th - c);
        }
        Ok(r)
    }

    /// Relative defect of the fusion hierarchy at level `2j = twice_j ≥ 1`:
    /// `t^(1/2)(u) t^(j−1/2)(u − jη) = t^(j)(u − (j−1/2)η) + δ(u) t^(j−1)(u − (j+1/2)η)`.
    pub fn hierarchy_residual(&self, twice_j: u32, u: c64) -> Result<f64> {
        self.hierarchy_residual_with(twice_j, u, true)
    }

    /// Hierarchy defect with `δ` forced to zero, a negative control.
    pub fn hierarchy_residual_without_delta(&self, twice_j: u32, u: c64) -> Result<f64> {
        self.hierarchy_residual_with(twice_j, u, false)
    }

    fn hierarchy_residual_with(&self, twice_j: u32, u: c64, with_delta: bool) -> Result<f64> {
        if twice_j == 0 {
            return Err(WorkbenchError::InvalidParams("hierarchy level must be at least 1/2".into()));
        }
        let e = self.eta();
        let j = twice_j as f64 / 2.0;
        let lhs = self
            .transfer_half(u)?
            .matmul(&self.transfer_level(twice_j - 1, u - e * j)?);
        let mut rhs = self.transfer_level(twice_j, u - e * (j - 0.5))?;
        if twice_j >= 2 && with_delta {
            let lower = self.transfer_level(twice_j - 2, u - e * (j + 0.5))?;
            rhs.axpy(self.delta(u)?, &lower);
        }
        Ok(rel_diff(&lhs, &rhs))
    }

    /// Relative defect of the closure identity at site `l` (1-based):
    /// `t^(s,s)(θ_l) t^(1/2,s)(θ_l − (1/2+s)η) = δ(θ_l + (1/2−s)η) t^(s−1/2,s)(θ_l + η/2)`.
    pub fn closure_residual(&self, l: usize) -> Result<f64> {
        self.closure_residual_shift(l, self.eta() * 0.5)
    }

    /// Closure defect with the right-hand argument `θ_l + (1/2+s)η`. This
    /// coincides with [`Chain::closure_residual`] only for `s = 1/2`.
    pub fn closure_residual_alternative(&self, l: usize) -> Result<f64> {
        self.closure_residual_shift(l, self.eta() * (0.5 + self.spin().value()))
    }

    /// Closure defect evaluated at `θ_l + offset` instead of `θ_l`; nonzero
    /// offsets serve as a negative control.
    pub fn closure_residual_at(&self, l: usize, offset: c64) -> Result<f64> {
        self.closure_residual_general(l, self.eta() * 0.5, offset)
    }

    fn closure_residual_shift(&self, l: usize, shift: c64) -> Result<f64> {
        self.closure_residual_general(l, shift, cr(0.0))
    }

    fn closure_residual_general(&self, l: usize, shift: c64, offset: c64) -> Result<f64> {
        if l == 0 || l > self.sites() {
            return Err(WorkbenchError::SiteOutOfRange { site: l, sites: self.sites() });
        }
        let th = self.params.theta[l - 1] + offset;
        let e = self.eta();
        let sv = self.spin().value();
        let tw = self.spin().twice();
        let lhs = self
            .transfer(self.spin(), th)?
            .matmul(&self.transfer_half(th - e * (0.5 + sv))?);
        let rhs = self
            .transfer_level(tw - 1, th + shift)?
            .scale(self.delta(th + e * (0.5 - sv))?);
        Ok(rel_diff(&lhs, &rhs))
    }

    /// `‖[t(u), t(v)]‖ / (‖t(u)‖ ‖t(v)‖)` for the spin-1/2 auxiliary space.
    pub fn commutativity_residual(&self, u: c64, v: c64) -> Result<f64> {
        let a = self.transfer_half(u)?;
        let b = self.transfer_half(v)?;
        Ok(a.commutator(&b).norm() / (a.norm() * b.norm()))
    }

    /// Commutator of transfer matrices with different auxiliary spins.
    pub fn mixed_commutativity_residual(&self, j1: SpinLabel, u: c64, j2: SpinLabel, v: c64) -> Result<f64> {
        let a = self.transfer(j1, u)?;
        let b = self.transfer(j2, v)?;
        Ok(a.commutator(&b).norm() / (a.norm() * b.norm()))
    }

    /// `t(−u − η)` against `t(u)`.
    pub fn crossing_residual(&self, u: c64) -> Result<f64> {
        Ok(rel_diff(
            &self.transfer_half(-u - self.eta())?,
            &self.transfer_half(u)?,
        ))
    }

    /// `2pq Π_l (θ_l + (1/2+s)η)(−θ_l + (1/2+s)η)`.
    pub fn value_at_zero(&self) -> c64 {
        let b = &self.params.boundary;
        let c = self.eta() * (0.5 + self.spin().value());
        self.params
            .theta
            .iter()
            .fold(b.p * b.q * 2.0, |acc, &th| acc * (th + c) * (c - th))
    }

    pub fn zero_value_residual(&self) -> Result<f64> {
        let t0 = self.transfer_half(cr(0.0))?;
        Ok(rel_diff(&t0, &CMatrix::scalar(self.dim(), self.value_at_zero())))
    }

    /// `2(ξς − 1)`.
    pub fn asymptotic_coefficient(&self) -> c64 {
        let b = &self.params.boundary;
        (b.xi * b.varsigma - 1.0) * 2.0
    }

    /// Matrix coefficients of `t^(1/2,s)(u)` as a polynomial of degree
    /// `2N + 2`, recovered by a discrete Fourier transform on a circle.
    pub fn transfer_coefficients(&self) -> Result<Vec<CMatrix>> {
        let n = 2 * self.sites() + 3;
        let radius = self.eta().norm() * 1.5;
        let samples: Vec<CMatrix> = (0..n)
            .map(|k| {
                let u = c64::from_polar(radius, std::f64::consts::TAU * k as f64 / n as f64);
                self.transfer_half(u)
            })
            .collect::<Result<_>>()?;
        let d = self.dim();
        Ok((0..n)
            .map(|m| {
                let mut c = CMatrix::zeros(d, d);
                for (k, s) in samples.iter().enumerate() {
                    let w = c64::from_polar(1.0, -std::f64::consts::TAU * (k * m) as f64 / n as f64);
                    c.axpy(w, s);
                }
                c.scale(cr(1.0 / (n as f64 * radius.powi(m as i32))))
            })
            .collect())
    }

    /// Leading coefficient of `t^(1/2,s)` against `2(ξς − 1)·id`.
    pub fn asymptotic_residual(&self) -> Result<f64> {
        let coeffs = self.transfer_coefficients()?;
        let lead = coeffs.last().expect("at least one coefficient");
        Ok(rel_diff(lead, &CMatrix::scalar(self.dim(), self.asymptotic_coefficient())))
    }

    /// Interpolated `t^(1/2,s)` against a direct evaluation at `u`.
    pub fn polynomiality_residual(&self, u: c64) -> Result<f64> {
        let coeffs = self.transfer_coefficients()?;
        let mut acc = CMatrix::zeros(self.dim(), self.dim());
        for c in coeffs.iter().rev() {
            acc = acc.scale(u);
            acc += c;
        }
        Ok(rel_diff(&acc, &self.transfer_half(u)?))
    }

    /// `R₀₀'(u−v) T₀(u) T₀'(v) = T₀'(v) T₀(u) R₀₀'(u−v)` for the spin-1/2
    /// auxiliary space.
    pub fn rtt_residual(&self, u: c64, v: c64) -> Result<f64> {
        let d = self.dim();
        let dims = [2, 2, d];
        let t0 = embed_op(&self.monodromy(SpinLabel::HALF, u)?, &[0, 2], &dims)?;
        let t1 = embed_op(&self.monodromy(SpinLabel::HALF, v)?, &[1, 2], &dims)?;
        let r = kron(&r_j_s_fused(u - v, SpinLabel::HALF, SpinLabel::HALF, self.eta())?, &CMatrix::identity(d))?;
        let lhs = r.matmul(&t0).matmul(&t1);
        let rhs = t1.matmul(&t0).matmul(&r);
        Ok(rel_diff(&lhs, &rhs))
    }

    /// `R(u−v) 𝒰₀(u) R(u+v) 𝒰₀'(v) = 𝒰₀'(v) R(u+v) 𝒰₀(u) R(u−v)`.
    pub fn double_row_reflection_residual(&self, u: c64, v: c64) -> Result<f64> {
        let d = self.dim();
        let dims = [2, 2, d];
        let h = SpinLabel::HALF;
        let u0 = embed_op(&self.double_row(h, u)?, &[0, 2], &dims)?;
        let u1 = embed_op(&self.double_row(h, v)?, &[1, 2], &dims)?;
        let id = CMatrix::identity(d);
        let rm = kron(&r_j_s_fused(u - v, h, h, self.eta())?, &id)?;
        let rp = kron(&r_j_s_fused(u + v, h, h, self.eta())?, &id)?;
        let lhs = rm.matmul(&u0).matmul(&rp).matmul(&u1);
        let rhs = u1.matmul(&rp).matmul(&u0).matmul(&rm);
        Ok(rel_diff(&lhs, &rhs))
    }

    /// Relative defect of `T̂(u) = (−1)^N [[D, −B], [−C, A]](−u−η)` for the
    /// spin-1/2 auxiliary space.
    pub fn hat_pattern_residual(&self, u: c64) -> Result<f64> {
        let d = self.dim();
        let t = self.monodromy(SpinLabel::HALF, -u - self.eta())?.aux_blocks(2);
        let sign = if self.sites().is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut want = CMatrix::zeros(2 * d, 2 * d);
        let blocks = [[&t[1][1], &t[0][1]], [&t[1][0], &t[0][0]]];
        let signs = [[1.0, -1.0], [-1.0, 1.0]];
        for a in 0..2 {
            for b in 0..2 {
                for i in 0..d {
                    for k in 0..d {
                        want[(a * d + i, b * d + k)] = blocks[a][b][(i, k)] * (sign * signs[a][b]);
                    }
                }
            }
        }
        Ok(rel_diff(&self.monodromy_hat(SpinLabel::HALF, u)?, &want))
    }

    /// Hamiltonian `H = ∂_u ln[f^(s)(u) t^(s,s)(u)]` at `u = 0`, `θ ≡ 0`.
    ///
    /// Uses the pole-free `P(u) = f^(s)(u) t^(s,s)(u)` and `H = P'(0) P(0)⁻¹`
    /// with a Richardson-extrapolated central difference.
    pub fn hamiltonian(&self) -> Result<CMatrix> {
        let homo = Chain::new(self.params.homogeneous())?;
        let s = self.spin();
        let p = |x: c64| homo.transfer_unnormalized(s, x);
        let p0 = p(cr(0.0))?;
        if p0.max_abs() <= 1e-12 * (1.0 + self.eta().norm()).powi(2 * s.twice() as i32 + 2) {
            return Err(WorkbenchError::SingularConfiguration(format!(
                "f^(s) t^(s,s) vanishes at u = 0 for s = {s}; the Hamiltonian is undefined"
            )));
        }
        let h = HAMILTONIAN_STEP * self.eta().norm();
        let diff = |h: f64| -> Result<CMatrix> {
            Ok((&p(cr(h))? - &p(cr(-h))?).scale(cr(1.0 / (2.0 * h))))
        };
        let d_half = diff(h / 2.0)?;
        let d_full = diff(h)?;
        let deriv = (&d_half.scale(cr(4.0)) - &d_full).scale(cr(1.0 / 3.0));
        let inv = inverse(&p0).map_err(|_| {
            WorkbenchError::SingularConfiguration("f^(s) t^(s,s) is singular at u = 0".into())
        })?;
        Ok(deriv.matmul(&inv))
    }

    /// `‖[H, t(u)]‖ / (‖H‖ ‖t(u)‖)` with `t` taken at `θ ≡ 0`.
    pub fn hamiltonian_commutator_residual(&self, h: &CMatrix, u: c64) -> Result<f64> {
        let homo = Chain::new(self.params.homogeneous())?;
        let t = homo.transfer_half(u)?;
        Ok(h.commutator(&t).norm() / (h.norm() * t.norm()))
    }

    /// `f^(s)(u)`.
    pub fn f_norm(&self, u: c64) -> c64 {
        f_norm(u, self.spin(), self.eta())
    }
}

/// Finite-difference step for the Hamiltonian, in units of `|η|`.
pub const HAMILTONIAN_STEP: f64 = 1e-5;
