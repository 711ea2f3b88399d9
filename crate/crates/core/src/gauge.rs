//! Gauge transformation diagonalizing the dual boundary, gauged one- and
//! double-row operators, local reference states and the product states built
//! from them.

use crate::boundary::{k_minus_half, k_plus_half};
use crate::error::{Result, WorkbenchError};
use crate::linalg::{c64, cr, inverse, kron, rel_diff, rel_diff_vec, CMatrix, CVector};
use crate::rmatrix::r_half_s_direct;
use crate::spin::{spin_matrices, SpinLabel};
use crate::transfer::{Chain, ModelParams};

/// Gauge matrix `U₀ = [[r − 1, ξ], [−r − 1, ξ]]` with `r = √(1 + ξ²)`.
#[derive(Clone, Debug)]
pub struct GaugeData {
    pub u0: CMatrix,
    pub u0_inv: CMatrix,
    pub xi: c64,
    /// `√(1 + ξ²)`, principal branch.
    pub r: c64,
}

impl GaugeData {
    pub fn new(xi: c64) -> Result<Self> {
        let r = (xi * xi + 1.0).sqrt();
        // det U₀ = 2rξ
        if xi.norm() < 1e-12 || r.norm() < 1e-12 {
            return Err(WorkbenchError::GaugeSingular { xi });
        }
        let u0 = CMatrix::from_2x2(r - 1.0, xi, -r - 1.0, xi);
        let u0_inv = inverse(&u0).map_err(|_| WorkbenchError::GaugeSingular { xi })?;
        Ok(Self { u0, u0_inv, xi, r })
    }

    /// `U₀ M U₀⁻¹` for a 2x2 matrix.
    pub fn conj(&self, m: &CMatrix) -> CMatrix {
        self.u0.matmul(m).matmul(&self.u0_inv)
    }

    /// `(U₀ ⊗ I) M (U₀⁻¹ ⊗ I)` for an operator on `C² ⊗ V`.
    pub fn conj_aux(&self, m: &CMatrix) -> Result<CMatrix> {
        let d = m.rows() / 2;
        let id = CMatrix::identity(d);
        Ok(kron(&self.u0, &id)?.matmul(m).matmul(&kron(&self.u0_inv, &id)?))
    }

    /// Diagonal entries `q ± r(u + η)` of the gauged `K⁺`.
    pub fn k_plus_diag(&self, u: c64, q: c64, eta: c64) -> (c64, c64) {
        (q + self.r * (u + eta), q - self.r * (u + eta))
    }

    /// Gauged `K⁻` for `ς = 0`:
    /// `[[p − u/r, −(r−1)u/r], [−(r+1)u/r, p + u/r]]`.
    pub fn k_minus_closed(&self, u: c64, p: c64) -> CMatrix {
        let r = self.r;
        CMatrix::from_2x2(p - u / r, -(r - 1.0) * u / r, -(r + 1.0) * u / r, p + u / r)
    }

    /// Closed form of the lower-left block of the gauged spin-(1/2, s) R-matrix.
    pub fn r21_closed(&self, s: SpinLabel, eta: c64) -> CMatrix {
        let sm = spin_matrices(s);
        let (r, xi) = (self.r, self.xi);
        let mut out = sm.sz.scale(xi * (r + 1.0) * 2.0 * eta);
        out.axpy((r + 1.0) * (r + 1.0) * eta, &sm.sm);
        out.axpy(-xi * xi * eta, &sm.sp);
        out.scale(-(xi * r * 2.0).inv())
    }

    /// Closed form of the upper-right block of the gauged spin-(1/2, s) R-matrix.
    pub fn r12_closed(&self, s: SpinLabel, eta: c64) -> CMatrix {
        let sm = spin_matrices(s);
        let (r, xi) = (self.r, self.xi);
        let mut out = sm.sz.scale(xi * (r - 1.0) * 2.0 * eta);
        out.axpy(-(r - 1.0) * (r - 1.0) * eta, &sm.sm);
        out.axpy(xi * xi * eta, &sm.sp);
        out.scale(-(xi * r * 2.0).inv())
    }
}

/// The four quantum-space blocks of an operator on `C² ⊗ V`.
#[derive(Clone, Debug)]
pub struct Blocks {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl Blocks {
    pub fn from_aux(m: &CMatrix) -> Self {
        let mut g = m.aux_blocks(2);
        let mut row1 = g.pop().expect("two block rows");
        let mut row0 = g.pop().expect("two block rows");
        let d = row1.pop().expect("block");
        let c = row1.pop().expect("block");
        let b = row0.pop().expect("block");
        let a = row0.pop().expect("block");
        Self { a, b, c, d }
    }
}

/// Relative defect of `Σ cᵢ Mᵢ = 0`, measured against the largest term.
pub fn relation_residual(terms: &[(c64, &CMatrix)]) -> f64 {
    let first = terms.first().expect("at least one term").1;
    let mut sum = CMatrix::zeros(first.rows(), first.cols());
    let mut scale: f64 = 0.0;
    for &(c, m) in terms {
        scale = scale.max(c.norm() * m.norm());
        sum.axpy(c, m);
    }
    if scale == 0.0 {
        0.0
    } else {
        sum.norm() / scale
    }
}

/// Local reference states `|s̃_a⟩`, `a = 1 … 2s+1`, of one site.
#[derive(Clone, Debug)]
pub struct ReferenceStates {
    pub states: Vec<CVector>,
    pub r12: CMatrix,
    pub r21: CMatrix,
}

impl ReferenceStates {
    /// Largest entry of `⟨s̃_a|s̃_b⟩ − δ_ab` (bilinear pairing).
    pub fn gram_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, x) in self.states.iter().enumerate() {
            for (b, y) in self.states.iter().enumerate() {
                let want = if a == b { cr(1.0) } else { cr(0.0) };
                worst = worst.max((x.dot(y) - want).norm());
            }
        }
        worst
    }

    /// `‖r̃₂₁|s̃₁⟩‖ / ‖r̃₂₁‖`.
    pub fn annihilation_defect(&self) -> f64 {
        self.r21.mul_vec(&self.states[0]).norm() / self.r21.norm()
    }

    pub fn first(&self) -> &CVector {
        &self.states[0]
    }

    pub fn last(&self) -> &CVector {
        self.states.last().expect("at least two states")
    }
}

fn falling_sqrt(twice: u32, j: u32) -> f64 {
    (0..j).map(|i| (twice - i) as f64).product::<f64>().sqrt()
}

fn factorial(j: u32) -> f64 {
    (1..=j).map(f64::from).product()
}

/// Closed-form coefficients of `|s̃₁⟩`; entry for `|−s + j⟩` sits at basis
/// index `2s − j`.
pub fn first_state_coefficients(s: SpinLabel, g: &GaugeData) -> CVector {
    let tw = s.twice();
    let mut v = CVector::zeros(s.dim());
    for j in 0..=tw {
        let c = g.xi.powu(j) * falling_sqrt(tw, j) / (factorial(j).sqrt() * (g.r + 1.0).powi(j as i32 - 2));
        v[(tw - j) as usize] = c;
    }
    v
}

/// Closed-form coefficients of `|s̃_{2s+1}⟩`.
pub fn last_state_coefficients(s: SpinLabel, g: &GaugeData) -> CVector {
    let tw = s.twice();
    let mut v = CVector::zeros(s.dim());
    for j in 0..=tw {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let c = g.xi.powu(j) * (sign * falling_sqrt(tw, j)) / (factorial(j).sqrt() * (g.r - 1.0).powi(j as i32 - 2));
        v[(tw - j) as usize] = c;
    }
    v
}

fn bilinear_normalize(v: &CVector) -> Result<CVector> {
    let n = v.dot(v);
    if n.norm() < 1e-300 || !n.is_finite() {
        return Err(WorkbenchError::SingularConfiguration(
            "reference state has vanishing bilinear norm".into(),
        ));
    }
    Ok(v.scale(n.sqrt().inv()))
}

/// The four special product states.
#[derive(Clone, Debug)]
pub struct ProductStates {
    /// `|Ω⟩ = ⊗ |s̃₁⟩`.
    pub omega: CVector,
    /// `⟨Ω̄| = ⊗ ⟨s̃_{2s+1}|`, stored as a vector paired bilinearly.
    pub omega_bar: CVector,
    /// `|0⟩ = ⊗ |s⟩`; `⟨0|` is the same vector used as a bra.
    pub vac: CVector,
}

/// A chain with `ς = 0` together with its gauge.
#[derive(Clone, Debug)]
pub struct GaugedChain {
    chain: Chain,
    gauge: GaugeData,
}

impl GaugedChain {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.require_diagonal_right_boundary()?;
        let gauge = GaugeData::new(params.boundary.xi)?;
        Ok(Self {
            chain: Chain::new(params)?,
            gauge,
        })
    }

    pub fn chain(&self) -> &Chain {
        &self.chain
    }

    pub fn gauge(&self) -> &GaugeData {
        &self.gauge
    }

    fn params(&self) -> &ModelParams {
        self.chain.params()
    }

    fn eta(&self) -> c64 {
        self.chain.eta()
    }

    fn sign(&self) -> f64 {
        if self.chain.sites().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Blocks of `U₀ T(u) U₀⁻¹`.
    pub fn one_row(&self, u: c64) -> Result<Blocks> {
        let t = self.chain.monodromy(SpinLabel::HALF, u)?;
        Ok(Blocks::from_aux(&self.gauge.conj_aux(&t)?))
    }

    /// Blocks of `U₀ 𝒰(u) U₀⁻¹`.
    pub fn double_row(&self, u: c64) -> Result<Blocks> {
        let m = self.chain.double_row(SpinLabel::HALF, u)?;
        Ok(Blocks::from_aux(&self.gauge.conj_aux(&m)?))
    }

    /// Blocks of the ungauged `𝒰(u)`.
    pub fn double_row_ungauged(&self, u: c64) -> Result<Blocks> {
        Ok(Blocks::from_aux(&self.chain.double_row(SpinLabel::HALF, u)?))
    }

    /// Blocks of the ungauged `T(u)`.
    pub fn one_row_ungauged(&self, u: c64) -> Result<Blocks> {
        Ok(Blocks::from_aux(&self.chain.monodromy(SpinLabel::HALF, u)?))
    }

    /// `a(u) = Π (u − θ_l + (1/2 + s)η)`.
    pub fn a_fn(&self, u: c64) -> c64 {
        let c = self.eta() * (0.5 + self.chain.spin().value());
        self.params().theta.iter().map(|&t| u - t + c).product()
    }

    /// `d(u) = Π (u − θ_l + (1/2 − s)η)`.
    pub fn d_fn(&self, u: c64) -> c64 {
        let c = self.eta() * (0.5 - self.chain.spin().value());
        self.params().theta.iter().map(|&t| u - t + c).product()
    }

    /// `U₀ K⁻(u) U₀⁻¹`.
    pub fn k_minus(&self, u: c64) -> CMatrix {
        self.gauge.conj(&k_minus_half(u, self.params().boundary.p, cr(0.0)))
    }

    /// `U₀ K⁺(u) U₀⁻¹`.
    pub fn k_plus(&self, u: c64) -> CMatrix {
        let b = &self.params().boundary;
        self.gauge.conj(&k_plus_half(u, b.q, b.xi, self.eta()))
    }

    /// Gauged local R-matrix blocks `(r̃₁₂, r̃₂₁)`; both are independent of `u`.
    pub fn local_offdiagonal(&self) -> Result<(CMatrix, CMatrix)> {
        let r = r_half_s_direct(cr(0.0), self.chain.spin(), self.eta());
        let b = Blocks::from_aux(&self.gauge.conj_aux(&r)?);
        Ok((b.b, b.c))
    }

    /// `|s̃₁⟩` from the closed form, then `|s̃_a⟩ ∝ r̃₁₂|s̃_{a−1}⟩`, each
    /// normalized to unit bilinear norm.
    pub fn reference_states(&self) -> Result<ReferenceStates> {
        let s = self.chain.spin();
        let (r12, r21) = self.local_offdiagonal()?;
        let mut states = vec![bilinear_normalize(&first_state_coefficients(s, &self.gauge))?];
        for _ in 1..s.dim() {
            let next = r12.mul_vec(states.last().expect("nonempty"));
            states.push(bilinear_normalize(&next)?);
        }
        Ok(ReferenceStates { states, r12, r21 })
    }

    pub fn product_states(&self) -> Result<ProductStates> {
        let refs = self.reference_states()?;
        let n = self.chain.sites();
        let mut omega = CVector::from_vec(vec![cr(1.0)]);
        let mut omega_bar = omega.clone();
        let mut vac = omega.clone();
        let top = CVector::basis(self.chain.spin().dim(), 0);
        for _ in 0..n {
            omega = omega.kron(refs.first());
            omega_bar = omega_bar.kron(refs.last());
            vac = vac.kron(&top);
        }
        Ok(ProductStates { omega, omega_bar, vac })
    }

    /// `t(u)` rebuilt as `K̃⁺₁₁(u) 𝒜̃(u) + K̃⁺₂₂(u) 𝒟̃(u)` against the direct trace.
    pub fn reconstruction_residual(&self, u: c64) -> Result<f64> {
        let blocks = self.double_row(u)?;
        let kp = self.k_plus(u);
        let mut t = blocks.a.scale(kp[(0, 0)]);
        t.axpy(kp[(1, 1)], &blocks.d);
        Ok(rel_diff(&t, &self.chain.transfer_half(u)?))
    }

    /// The six one-row exchange relations at `(u, v)`.
    pub fn one_row_relations(&self, u: c64, v: c64) -> Result<Vec<(&'static str, f64)>> {
        let e = self.eta();
        let x = self.one_row(u)?;
        let y = self.one_row(v)?;
        let w = u - v;
        let one = cr(1.0);
        let m1 = cr(-1.0);
        let f_minus = (w - e) / w;
        let f_plus = (w + e) / w;
        let g = e / w;
        Ok(vec![
            (
                "A(u)B(v)",
                relation_residual(&[
                    (one, &x.a.matmul(&y.b)),
                    (-f_minus, &y.b.matmul(&x.a)),
                    (-g, &x.b.matmul(&y.a)),
                ]),
            ),
            (
                "D(u)B(v)",
                relation_residual(&[
                    (one, &x.d.matmul(&y.b)),
                    (-f_plus, &y.b.matmul(&x.d)),
                    (g, &x.b.matmul(&y.d)),
                ]),
            ),
            (
                "B(u)D(v)",
                relation_residual(&[
                    (one, &x.b.matmul(&y.d)),
                    (-f_plus, &y.d.matmul(&x.b)),
                    (g, &x.d.matmul(&y.b)),
                ]),
            ),
            (
                "C(u)A(v)",
                relation_residual(&[
                    (one, &x.c.matmul(&y.a)),
                    (-f_plus, &y.a.matmul(&x.c)),
                    (g, &x.a.matmul(&y.c)),
                ]),
            ),
            (
                "C(u)D(v)",
                relation_residual(&[
                    (one, &x.c.matmul(&y.d)),
                    (-f_minus, &y.d.matmul(&x.c)),
                    (-g, &x.d.matmul(&y.c)),
                ]),
            ),
            (
                "[C(u),B(v)]",
                relation_residual(&[
                    (one, &x.c.matmul(&y.b)),
                    (m1, &y.b.matmul(&x.c)),
                    (-g, &x.d.matmul(&y.a)),
                    (g, &y.d.matmul(&x.a)),
                ]),
            ),
        ])
    }

    /// The double-row exchange relations at `(u, v)`.
    pub fn double_row_relations(&self, u: c64, v: c64) -> Result<Vec<(&'static str, f64)>> {
        let e = self.eta();
        let x = self.double_row(u)?;
        let y = self.double_row(v)?;
        let (s, dlt) = (u + v, u - v);
        let one = cr(1.0);
        let m1 = cr(-1.0);
        let f1 = s * (dlt + e) / (dlt * (s + e));
        let f2 = e / (s + e);
        let f3 = s * e / (dlt * (s + e));
        let f4 = e * (s + e * 2.0) / (dlt * (s + e));
        Ok(vec![
            (
                "C(u)A(v)",
                relation_residual(&[
                    (one, &x.c.matmul(&y.a)),
                    (-f1, &y.a.matmul(&x.c)),
                    (f2, &x.d.matmul(&y.c)),
                    (f3, &x.a.matmul(&y.c)),
                ]),
            ),
            (
                "D(v)C(u)",
                relation_residual(&[
                    (one, &y.d.matmul(&x.c)),
                    (-f1, &x.c.matmul(&y.d)),
                    (f2, &y.c.matmul(&x.a)),
                    (f3, &y.c.matmul(&x.d)),
                ]),
            ),
            (
                "A(u)A(v)",
                relation_residual(&[
                    (one, &x.a.matmul(&y.a)),
                    (m1, &y.a.matmul(&x.a)),
                    (-f2, &y.b.matmul(&x.c)),
                    (f2, &x.b.matmul(&y.c)),
                ]),
            ),
            (
                "D(u)D(v)",
                relation_residual(&[
                    (one, &x.d.matmul(&y.d)),
                    (m1, &y.d.matmul(&x.d)),
                    (-f2, &y.c.matmul(&x.b)),
                    (f2, &x.c.matmul(&y.b)),
                ]),
            ),
            (
                "D(u)A(v)",
                relation_residual(&[
                    (one, &x.d.matmul(&y.a)),
                    (m1, &y.a.matmul(&x.d)),
                    (f4, &x.b.matmul(&y.c)),
                    (-f4, &y.b.matmul(&x.c)),
                ]),
            ),
            (
                "[C(u),C(v)]",
                relation_residual(&[(one, &x.c.matmul(&y.c)), (m1, &y.c.matmul(&x.c))]),
            ),
            (
                "[B(u),B(v)]",
                relation_residual(&[(one, &x.b.matmul(&y.b)), (m1, &y.b.matmul(&x.b))]),
            ),
        ])
    }

    /// Quantum-determinant identities of the gauged one-row monodromy matrix
    /// and of its hatted partner, plus the four shifted exchange relations.
    pub fn one_row_determinant_relations(&self, u: c64) -> Result<Vec<(&'static str, f64)>> {
        let e = self.eta();
        let x = self.one_row(u)?;
        let xm = self.one_row(u - e)?;
        let one = cr(1.0);
        let m1 = cr(-1.0);
        let det1 = &xm.a.matmul(&x.d) - &xm.c.matmul(&x.b);
        let det2 = &xm.d.matmul(&x.a) - &xm.b.matmul(&x.c);
        let n = -u;
        let y = self.one_row(n)?;
        let ym = self.one_row(n - e)?;
        let hat1 = &y.a.matmul(&ym.d) - &y.b.matmul(&ym.c);
        let hat2 = &y.d.matmul(&ym.a) - &y.c.matmul(&ym.b);
        let (_, det_scalar_defect) = crate::boundary::identity_scalar(&det1)?;
        Ok(vec![
            ("Det_q T two forms", rel_diff(&det1, &det2)),
            ("Det_q T central", det_scalar_defect),
            ("Det_q T-hat two forms", rel_diff(&hat1, &hat2)),
            ("A(u)B(u-eta)", relation_residual(&[(one, &x.a.matmul(&xm.b)), (m1, &x.b.matmul(&xm.a))])),
            ("C(u)D(u-eta)", relation_residual(&[(one, &x.c.matmul(&xm.d)), (m1, &x.d.matmul(&xm.c))])),
            ("D(u-eta)B(u)", relation_residual(&[(one, &xm.d.matmul(&x.b)), (m1, &xm.b.matmul(&x.d))])),
            ("A(u-eta)C(u)", relation_residual(&[(one, &xm.a.matmul(&x.c)), (m1, &xm.c.matmul(&x.a))])),
        ])
    }

    /// Reference-state eigen-relations of the gauged operators at `u`.
    pub fn product_state_relations(&self, u: c64) -> Result<Vec<(&'static str, f64)>> {
        let st = self.product_states()?;
        let (om, ob) = (&st.omega, &st.omega_bar);
        let x = self.one_row(u)?;
        let dr = self.double_row(u)?;
        let e = self.eta();
        let (a, d) = (self.a_fn(u), self.d_fn(u));
        let km = self.k_minus(u);
        let sign = self.sign();
        let zero_rel = |v: &CVector, m: &CMatrix| v.norm() / (m.norm() * om.norm().max(ob.norm()));
        let c_om = x.c.mul_vec(om);
        let ob_c = x.c.vec_mul(ob);
        let cr_right = km[(1, 0)] * d * self.d_fn(-u - e) * sign;
        let cr_left = km[(1, 0)] * a * self.a_fn(-u - e) * sign;
        Ok(vec![
            ("A|Omega>", rel_diff_vec(&x.a.mul_vec(om), &om.scale(a))),
            ("D|Omega>", rel_diff_vec(&x.d.mul_vec(om), &om.scale(d))),
            ("C|Omega>", zero_rel(&c_om, &x.c)),
            ("<Omega-bar|A", rel_diff_vec(&x.a.vec_mul(ob), &ob.scale(d))),
            ("<Omega-bar|D", rel_diff_vec(&x.d.vec_mul(ob), &ob.scale(a))),
            ("<Omega-bar|C", zero_rel(&ob_c, &x.c)),
            ("script-C|Omega>", rel_diff_vec(&dr.c.mul_vec(om), &om.scale(cr_right))),
            ("<Omega-bar|script-C", rel_diff_vec(&dr.c.vec_mul(ob), &ob.scale(cr_left))),
        ])
    }

    /// Actions of the ungauged operators on the highest-weight bra `⟨0|`.
    pub fn vacuum_relations(&self, u: c64) -> Result<Vec<(&'static str, f64)>> {
        let st = self.product_states()?;
        let v0 = &st.vac;
        let e = self.eta();
        let p = self.params().boundary.p;
        let (k11, k22) = (p + u, p - u);
        let sign = self.sign();
        let one = self.one_row_ungauged(u)?;
        let one_m = self.one_row_ungauged(-u - e)?;
        let dr = self.double_row_ungauged(u)?;
        let (a, d) = (self.a_fn(u), self.d_fn(u));
        let (am, dm) = (self.a_fn(-u - e), self.d_fn(-u - e));
        let den = u * 2.0 + e;
        let script_a = k11 * a * dm * sign;
        let script_d = (e / den * k11 * a * dm + (den * k22 - e * k11) / den * am * d) * sign;
        let mut c_want = one.c.vec_mul(v0).scale(u * 2.0 / den * k11 * dm * sign);
        c_want.axpy((e * k11 - den * k22) / den * d * sign, &one_m.c.vec_mul(v0));
        let zero = |w: CVector, m: &CMatrix| w.norm() / (m.norm() * v0.norm());
        Ok(vec![
            ("<0|A", rel_diff_vec(&one.a.vec_mul(v0), &v0.scale(a))),
            ("<0|D", rel_diff_vec(&one.d.vec_mul(v0), &v0.scale(d))),
            ("<0|B", zero(one.b.vec_mul(v0), &one.b)),
            ("<0|script-A", rel_diff_vec(&dr.a.vec_mul(v0), &v0.scale(script_a))),
            ("<0|script-D", rel_diff_vec(&dr.d.vec_mul(v0), &v0.scale(script_d))),
            ("<0|script-B", zero(dr.b.vec_mul(v0), &dr.b)),
            ("<0|script-C", rel_diff_vec(&dr.c.vec_mul(v0), &c_want)),
        ])
    }

    /// Actions of `𝒜̃(u)` and `𝒟̄(u)` on `|Ω⟩` in terms of `B̃`.
    pub fn omega_action_relations(&self, u: c64) -> Result<Vec<(&'static str, f64)>> {
        let st = self.product_states()?;
        let om = &st.omega;
        let e = self.eta();
        let sign = self.sign();
        let dr = self.double_row(u)?;
        let x = self.one_row(u)?;
        let xm = self.one_row(-u - e)?;
        let km = self.k_minus(u);
        let (a, d) = (self.a_fn(u), self.d_fn(u));
        let (am, dm) = (self.a_fn(-u - e), self.d_fn(-u - e));
        let den = u * 2.0 + e;

        let mut want_a = om.scale(km[(0, 0)] * a * dm);
        want_a.axpy(km[(1, 0)] * dm, &x.b.mul_vec(om));
        let want_a = want_a.scale(cr(sign));

        let dbar = dbar_from_blocks(&dr, u, e)?;
        let mut want_d = om.scale((den * km[(1, 1)] - e * km[(0, 0)]) / den * d * am);
        want_d.axpy(-(u * 2.0 + e * 2.0) / den * km[(1, 0)] * d, &xm.b.mul_vec(om));
        let want_d = want_d.scale(cr(sign));
        Ok(vec![
            ("script-A|Omega>", rel_diff_vec(&dr.a.mul_vec(om), &want_a)),
            ("D-bar|Omega>", rel_diff_vec(&dbar.mul_vec(om), &want_d)),
        ])
    }

    /// Gauged double-row blocks expressed through the ungauged ones.
    /// Relative defect of the double-row quantum determinant written with
    /// `𝒟̄(u−η) 𝒜̃(u) − 2u/(2u−η) ℬ̃(u−η) 𝒞̃(u)`.
    pub fn double_row_determinant_residual(&self, u: c64) -> Result<f64> {
        let e = self.eta();
        let x = self.double_row(u)?;
        let xm = self.double_row(u - e)?;
        let dbar_m = dbar_from_blocks(&xm, u - e, e)?;
        let mut lhs = dbar_m.matmul(&x.a);
        lhs.axpy(-u * 2.0 / (u * 2.0 - e), &xm.b.matmul(&x.c));
        let p = self.chain.params().boundary.p;
        let value = (u * 2.0 - e * 2.0) / (u * 2.0 - e)
            * (p * p - u * u)
            * self.a_fn(u)
            * self.d_fn(-u - e)
            * self.a_fn(-u)
            * self.d_fn(u - e);
        Ok(rel_diff(&lhs, &CMatrix::scalar(lhs.rows(), value)))
    }

    pub fn gauge_expansion_residual(&self, u: c64) -> Result<f64> {
        let g = self.double_row(u)?;
        let b = self.double_row_ungauged(u)?;
        let (xi, r) = (self.gauge.xi, self.gauge.r);
        let pre = (xi * r * 2.0).inv();
        let combo = |ca: c64, cb: c64, cc: c64, cd: c64| -> CMatrix {
            let mut m = b.a.scale(ca);
            m.axpy(cb, &b.b);
            m.axpy(cc, &b.c);
            m.axpy(cd, &b.d);
            m.scale(pre)
        };
        let a_want = combo(xi * (r - 1.0), xi * xi, xi * xi, xi * (r + 1.0));
        let c_want = combo(-xi * (r + 1.0), -(r + 1.0) * (r + 1.0), xi * xi, xi * (r + 1.0));
        let d_want = combo(xi * (r + 1.0), -xi * xi, -xi * xi, xi * (r - 1.0));
        Ok(rel_diff(&g.a, &a_want)
            .max(rel_diff(&g.c, &c_want))
            .max(rel_diff(&g.d, &d_want)))
    }
}

/// `𝒟̄(u) = 𝒟̃(u) − η/(2u + η) 𝒜̃(u)` from precomputed blocks.
pub fn dbar_from_blocks(blocks: &Blocks, u: c64, eta: c64) -> Result<CMatrix> {
    let den = u * 2.0 + eta;
    crate::rmatrix::check_pole(|| "D-bar denominator 2u + eta".into(), den, u, eta.norm())?;
    let mut m = blocks.d.clone();
    m.axpy(-eta / den, &blocks.a);
    Ok(m)
}
