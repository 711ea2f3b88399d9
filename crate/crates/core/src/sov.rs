//! Separation-of-variables basis built from the gauged double-row operators,
//! scalar products with transfer-matrix eigenstates and overlaps with the
//! highest-weight state.

use std::fmt;

use crate::error::{Result, WorkbenchError};
use crate::gauge::{dbar_from_blocks, GaugedChain, ProductStates};
use crate::linalg::{c64, cr, rel_diff_vec, singular_values, CMatrix, CVector};
use crate::transfer::ModelParams;

/// Occupation numbers `α_j ∈ [0, 2s]`, one per site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SovIndex(Vec<u32>);

impl SovIndex {
    pub fn new(alpha: Vec<u32>, twice_s: u32) -> Result<Self> {
        if let Some(&bad) = alpha.iter().find(|&&a| a > twice_s) {
            return Err(WorkbenchError::InvalidParams(format!(
                "SoV label {bad} outside [0, {twice_s}]"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn zero(sites: usize) -> Self {
        Self(vec![0; sites])
    }

    /// All `(2s+1)^N` labels, first site most significant.
    pub fn all(twice_s: u32, sites: usize) -> Vec<Self> {
        let base = twice_s + 1;
        let count = (base as usize).pow(sites as u32);
        (0..count)
            .map(|mut k| {
                let mut a = vec![0; sites];
                for slot in a.iter_mut().rev() {
                    *slot = (k % base as usize) as u32;
                    k /= base as usize;
                }
                Self(a)
            })
            .collect()
    }

    pub fn alpha(&self) -> &[u32] {
        &self.0
    }

    pub fn sites(&self) -> usize {
        self.0.len()
    }

    /// Same label with `α_n` replaced by `m` (0-based `n`).
    pub fn with(&self, n: usize, m: u32) -> Self {
        let mut a = self.0.clone();
        a[n] = m;
        Self(a)
    }

    /// `α_j ↦ 2s − α_j`.
    pub fn reflected(&self, twice_s: u32) -> Self {
        Self(self.0.iter().map(|a| twice_s - a).collect())
    }
}

impl fmt::Display for SovIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// `β_l = θ_l − (1/2 − s)η` and `β'_l = θ_l − (1/2 + s)η`.
#[derive(Clone, Debug)]
pub struct BetaGrid {
    pub beta: Vec<c64>,
    pub beta_prime: Vec<c64>,
}

impl BetaGrid {
    pub fn new(params: &ModelParams) -> Self {
        let s = params.spin.value();
        let e = params.eta;
        Self {
            beta: params.theta.iter().map(|&t| t - e * (0.5 - s)).collect(),
            beta_prime: params.theta.iter().map(|&t| t - e * (0.5 + s)).collect(),
        }
    }
}

/// Diagonality report of the left/right SoV pairing.
#[derive(Clone, Copy, Debug)]
pub struct PairingReport {
    /// Largest normalized off-diagonal entry when left label `α` is paired
    /// with right label `2s − α`.
    pub reflected_leakage: f64,
    /// Same, pairing equal labels.
    pub direct_leakage: f64,
    /// Smallest normalized entry on the reflected diagonal.
    pub min_diagonal: f64,
}

/// SoV machinery for one chain, with the gauged operators on the β-grid
/// evaluated once.
#[derive(Clone, Debug)]
pub struct Sov {
    gauged: GaugedChain,
    grid: BetaGrid,
    states: ProductStates,
    /// `𝒜̃(β_j − kη)`, indexed `[j][k]`.
    a_ops: Vec<Vec<CMatrix>>,
    /// `𝒟̃(−β'_j − (k+1)η)`, indexed `[j][k]`.
    d_ops: Vec<Vec<CMatrix>>,
}

impl Sov {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.check_generic()?;
        let gauged = GaugedChain::new(params)?;
        let grid = BetaGrid::new(gauged.chain().params());
        let states = gauged.product_states()?;
        let e = gauged.chain().eta();
        let tw = gauged.chain().spin().twice();
        let mut a_ops = Vec::new();
        let mut d_ops = Vec::new();
        for (b, bp) in grid.beta.iter().zip(&grid.beta_prime) {
            let mut a_row = Vec::new();
            let mut d_row = Vec::new();
            for k in 0..tw {
                let k = k as f64;
                a_row.push(gauged.double_row(b - e * k)?.a);
                d_row.push(gauged.double_row(-bp - e * (k + 1.0))?.d);
            }
            a_ops.push(a_row);
            d_ops.push(d_row);
        }
        Ok(Self {
            gauged,
            grid,
            states,
            a_ops,
            d_ops,
        })
    }

    pub fn gauged(&self) -> &GaugedChain {
        &self.gauged
    }

    pub fn grid(&self) -> &BetaGrid {
        &self.grid
    }

    pub fn states(&self) -> &ProductStates {
        &self.states
    }

    fn eta(&self) -> c64 {
        self.gauged.chain().eta()
    }

    fn twice_s(&self) -> u32 {
        self.gauged.chain().spin().twice()
    }

    fn sign(&self) -> c64 {
        cr(if self.gauged.chain().sites().is_multiple_of(2) { 1.0 } else { -1.0 })
    }

    pub fn indices(&self) -> Vec<SovIndex> {
        SovIndex::all(self.twice_s(), self.gauged.chain().sites())
    }

    fn check_index(&self, idx: &SovIndex) -> Result<()> {
        let n = self.gauged.chain().sites();
        if idx.sites() != n {
            return Err(WorkbenchError::DimensionMismatch {
                context: "SoV index length",
                expected: n,
                found: idx.sites(),
            });
        }
        SovIndex::new(idx.0.clone(), self.twice_s()).map(|_| ())
    }

    /// `Π_j Π_{k = α_j−1 … 0} 𝒜̃(β_j − kη) |Ω⟩`.
    pub fn right(&self, idx: &SovIndex) -> Result<CVector> {
        self.check_index(idx)?;
        let mut v = self.states.omega.clone();
        for (j, &a) in idx.0.iter().enumerate() {
            for k in 0..a as usize {
                v = self.a_ops[j][k].mul_vec(&v);
            }
        }
        Ok(v)
    }

    /// `⟨Ω̄| Π_j Π_{k = 0 … α_j−1} 𝒟̃(−β'_j − (k+1)η)` as a bilinear bra.
    pub fn left(&self, idx: &SovIndex) -> Result<CVector> {
        self.check_index(idx)?;
        let mut v = self.states.omega_bar.clone();
        for (j, &a) in idx.0.iter().enumerate() {
            for k in 0..a as usize {
                v = self.d_ops[j][k].vec_mul(&v);
            }
        }
        Ok(v)
    }

    /// Eigenvalue of `𝒞̃(u)` on the right basis vector.
    pub fn h(&self, u: c64, idx: &SovIndex) -> c64 {
        let g = &self.gauged;
        let e = self.eta();
        let mut out = self.sign() * g.k_minus(u)[(1, 0)] * g.d_fn(-u - e) * g.d_fn(u);
        for (b, &a) in self.grid.beta.iter().zip(&idx.0) {
            let a = a as f64;
            out *= (u - b + e * a) * (u + b + e - e * a) / ((u - b) * (u + b + e));
        }
        out
    }

    /// Eigenvalue of `𝒞̃(u)` on the left basis vector.
    pub fn hbar(&self, u: c64, idx: &SovIndex) -> c64 {
        let g = &self.gauged;
        let e = self.eta();
        let mut out = self.sign() * g.k_minus(u)[(1, 0)] * g.a_fn(-u - e) * g.a_fn(u);
        for (b, &a) in self.grid.beta_prime.iter().zip(&idx.0) {
            let a = a as f64;
            out *= (u - b - e * a) * (u + b + e + e * a) / ((u - b) * (u + b + e));
        }
        out
    }

    /// `(right, left)` relative defects of the `𝒞̃(u)` eigen-relations.
    pub fn c_eigen_residuals(&self, u: c64, idx: &SovIndex) -> Result<(f64, f64)> {
        let c = self.gauged.double_row(u)?.c;
        let r = self.right(idx)?;
        let l = self.left(idx)?;
        Ok((
            rel_diff_vec(&c.mul_vec(&r), &r.scale(self.h(u, idx))),
            rel_diff_vec(&c.vec_mul(&l), &l.scale(self.hbar(u, idx))),
        ))
    }

    /// Matrix whose columns are the right basis vectors in [`Self::indices`] order.
    pub fn right_matrix(&self) -> Result<CMatrix> {
        let cols = self
            .indices()
            .iter()
            .map(|i| self.right(i))
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_columns(&cols))
    }

    /// 2-norm condition number of the right basis.
    pub fn right_condition(&self) -> Result<f64> {
        let sv = singular_values(&self.right_matrix()?)?;
        let max = sv.iter().cloned().fold(0.0, f64::max);
        let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(if min == 0.0 { f64::INFINITY } else { max / min })
    }

    pub fn pairing(&self) -> Result<PairingReport> {
        let idx = self.indices();
        let tw = self.twice_s();
        let rights = idx.iter().map(|i| self.right(i)).collect::<Result<Vec<_>>>()?;
        let lefts = idx.iter().map(|i| self.left(i)).collect::<Result<Vec<_>>>()?;
        let mut reflected_leakage: f64 = 0.0;
        let mut direct_leakage: f64 = 0.0;
        let mut min_diagonal = f64::INFINITY;
        for (a, l) in idx.iter().zip(&lefts) {
            let partner = a.reflected(tw);
            for (b, r) in idx.iter().zip(&rights) {
                let v = l.dot(r).norm() / (l.norm() * r.norm());
                if *b == partner {
                    min_diagonal = min_diagonal.min(v);
                } else {
                    reflected_leakage = reflected_leakage.max(v);
                }
                if a != b {
                    direct_leakage = direct_leakage.max(v);
                }
            }
        }
        Ok(PairingReport {
            reflected_leakage,
            direct_leakage,
            min_diagonal,
        })
    }

    /// `𝒟̄(u) = 𝒟̃(u) − η/(2u+η) 𝒜̃(u)`.
    pub fn dbar(&self, u: c64) -> Result<CMatrix> {
        dbar_from_blocks(&self.gauged.double_row(u)?, u, self.eta())
    }

    /// `max_j ‖𝒟̄(β_j)|Ω⟩‖ / (‖𝒟̄(β_j)‖ ‖Ω‖)`.
    pub fn dbar_omega_residual(&self) -> Result<f64> {
        let om = &self.states.omega;
        let mut worst: f64 = 0.0;
        for &b in &self.grid.beta {
            let d = self.dbar(b)?;
            worst = worst.max(d.mul_vec(om).norm() / (d.norm() * om.norm()));
        }
        Ok(worst)
    }

    /// `𝒟̄(u−η)𝒜̃(u) − 2u/(2u−η) ℬ̃(u−η)𝒞̃(u)` against its scalar value.
    pub fn quantum_determinant_residual(&self, u: c64) -> Result<f64> {
        self.gauged.double_row_determinant_residual(u)
    }

    /// Coefficient `c_m` in `𝒟̄(β_n − mη)|…α_n = m…⟩ = c_m |…α_n = m−1…⟩`.
    pub fn dbar_coefficient(&self, n: usize, m: u32) -> c64 {
        let g = &self.gauged;
        let e = self.eta();
        let b = self.grid.beta[n];
        let m = m as f64;
        let p = g.chain().params().boundary.p;
        let x = b - e * (m - 1.0);
        (b * 2.0 - e * (2.0 * m)) / (b * 2.0 - e * (2.0 * m - 1.0))
            * (p * p - x * x)
            * g.a_fn(x)
            * g.d_fn(-b + e * (m - 2.0))
            * g.a_fn(-b + e * (m - 1.0))
            * g.d_fn(b - e * m)
    }

    /// Defect of the `𝒟̄` lowering action on the basis vector with `α_n = m`.
    pub fn dbar_action_residual(&self, idx: &SovIndex, n: usize, m: u32) -> Result<f64> {
        if m == 0 || m > self.twice_s() {
            return Err(WorkbenchError::InvalidParams(format!("lowering index m = {m} out of range")));
        }
        let upper = idx.with(n, m);
        let lower = idx.with(n, m - 1);
        let lhs = self.dbar(self.grid.beta[n] - self.eta() * m as f64)?.mul_vec(&self.right(&upper)?);
        let rhs = self.right(&lower)?.scale(self.dbar_coefficient(n, m));
        Ok(rel_diff_vec(&lhs, &rhs))
    }

    /// `F(α) = ⟨Ψ|β^{(α)}⟩` (bilinear).
    pub fn scalar_product(&self, psi: &CVector, idx: &SovIndex) -> Result<c64> {
        Ok(psi.dot(&self.right(idx)?))
    }

    /// Closed-form `F(α)/F₀` for the eigenstate with Q-function `q`.
    pub fn closed_form_ratio(&self, idx: &SovIndex, q: impl Fn(c64) -> c64) -> Result<c64> {
        self.check_index(idx)?;
        let g = &self.gauged;
        let e = self.eta();
        let p = g.chain().params().boundary.p;
        let mut out = cr(1.0);
        for (&b, &a) in self.grid.beta.iter().zip(&idx.0) {
            for k in 0..a {
                let k = k as f64;
                let x = b - e * k;
                let den = q(x);
                if den.norm() < 1e-300 {
                    return Err(WorkbenchError::SingularConfiguration(format!(
                        "Q vanishes at beta-grid point {x}"
                    )));
                }
                out *= self.sign() * (p + x) * g.a_fn(x) * g.d_fn(-b + e * (k - 1.0)) * q(x - e) / den;
            }
        }
        Ok(out)
    }

    /// Initial condition of the recursion: `F(α_n = 1)` from `F(α_n = 0)` and `Λ(β_n)`.
    pub fn initial_condition_residual(
        &self,
        psi: &CVector,
        lambda: impl Fn(c64) -> c64,
        idx: &SovIndex,
        n: usize,
    ) -> Result<f64> {
        let e = self.eta();
        let b = self.grid.beta[n];
        let bd = &self.gauged.chain().params().boundary;
        let (k1, k2) = self.gauged.gauge().k_plus_diag(b, bd.q, e);
        let f0 = self.scalar_product(psi, &idx.with(n, 0))?;
        let f1 = self.scalar_product(psi, &idx.with(n, 1))?;
        let den = b * 2.0 + e;
        let lhs = f1 * (den * k1 + e * k2);
        let rhs = den * lambda(b) * f0;
        Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()))
    }

    /// Three-term recursion linking `F(α_n = m ± 1)` and `F(α_n = m)`,
    /// `1 ≤ m ≤ 2s − 1`.
    pub fn recursion_residual(
        &self,
        psi: &CVector,
        lambda: impl Fn(c64) -> c64,
        idx: &SovIndex,
        n: usize,
        m: u32,
    ) -> Result<f64> {
        if m == 0 || m >= self.twice_s() {
            return Err(WorkbenchError::InvalidParams(format!("recursion index m = {m} out of range")));
        }
        let e = self.eta();
        let x = self.grid.beta[n] - e * m as f64;
        let bd = &self.gauged.chain().params().boundary;
        let (k1, k2) = self.gauged.gauge().k_plus_diag(x, bd.q, e);
        let f = |a: u32| self.scalar_product(psi, &idx.with(n, a));
        let (fm, fp, fl) = (f(m)?, f(m + 1)?, f(m - 1)?);
        let terms = [
            lambda(x) * fm,
            -(k1 + e * k2 / (x * 2.0 + e)) * fp,
            -k2 * self.dbar_coefficient(n, m) * fl,
        ];
        let scale = terms.iter().map(|t| t.norm()).fold(0.0, f64::max);
        Ok(terms.iter().sum::<c64>().norm() / scale)
    }

    /// Closed-form `⟨0|β^{(α)}⟩ / ⟨0|Ω⟩`.
    pub fn vac_ratio_formula(&self, idx: &SovIndex) -> Result<c64> {
        self.check_index(idx)?;
        let g = &self.gauged;
        let e = self.eta();
        let p = g.chain().params().boundary.p;
        let mut out = cr(1.0);
        for (&b, &a) in self.grid.beta.iter().zip(&idx.0) {
            for k in 0..a {
                let k = k as f64;
                let x = b - e * k;
                out *= self.sign() * (p + x) * g.a_fn(x) * g.d_fn(-b + e * (k - 1.0));
            }
        }
        Ok(out)
    }

    /// `⟨0|β^{(α)}⟩ / ⟨0|Ω⟩` by direct pairing.
    pub fn vac_ratio(&self, idx: &SovIndex) -> Result<c64> {
        let vac = &self.states.vac;
        let base = vac.dot(&self.states.omega);
        if base.norm() < 1e-12 * self.states.omega.norm() {
            return Err(WorkbenchError::SingularConfiguration("<0|Omega> vanishes".into()));
        }
        Ok(vac.dot(&self.right(idx)?) / base)
    }

    /// `⟨0|𝒞(x)|v⟩` against `(1 + r)/ξ ⟨0|𝒜(x) − 𝒟(x)|v⟩` at
    /// `x = β_n − (m−1)η`, `v` the basis vector with `α_n = m − 1`.
    pub fn vac_c_relation_residual(&self, idx: &SovIndex, n: usize, m: u32) -> Result<f64> {
        let x = self.grid.beta[n] - self.eta() * (m as f64 - 1.0);
        let v = self.right(&idx.with(n, m - 1))?;
        let blocks = self.gauged.double_row_ungauged(x)?;
        let vac = &self.states.vac;
        let gd = self.gauged.gauge();
        let lhs = vac.dot(&blocks.c.mul_vec(&v));
        let rhs = (gd.r + 1.0) / gd.xi * vac.dot(&(&blocks.a - &blocks.d).mul_vec(&v));
        let scale = lhs.norm().max(rhs.norm()).max(vac.norm() * blocks.c.norm() * v.norm() * 1e-3);
        Ok((lhs - rhs).norm() / scale)
    }

    /// `⟨0|𝒞̃(β_n − (m−1)η)|…α_n = m−1…⟩ = 0`, relative to the operator scale.
    pub fn vac_annihilation_residual(&self, idx: &SovIndex, n: usize, m: u32) -> Result<f64> {
        let x = self.grid.beta[n] - self.eta() * (m as f64 - 1.0);
        let v = self.right(&idx.with(n, m - 1))?;
        let c = self.gauged.double_row(x)?.c;
        let vac = &self.states.vac;
        Ok(vac.dot(&c.mul_vec(&v)).norm() / (vac.norm() * c.norm() * v.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryParams;
    use crate::linalg::eigenpairs;
    use crate::spin::SpinLabel;

    fn sov(tw: u32, theta: &[f64]) -> Sov {
        let p = ModelParams::new(
            SpinLabel::from_twice(tw).unwrap(),
            cr(1.0),
            BoundaryParams::new(cr(0.8), cr(0.0), cr(1.2), cr(0.6)),
            theta.iter().map(|&t| cr(t)).collect(),
        )
        .unwrap();
        Sov::new(p).unwrap()
    }

    fn configs() -> Vec<Sov> {
        vec![
            sov(1, &[0.31, -0.17, 0.23]),
            sov(2, &[0.31, -0.17]),
            sov(1, &[0.31, -0.17]),
            sov(3, &[0.31]),
        ]
    }

    #[test]
    fn index_enumeration() {
        let all = SovIndex::all(2, 2);
        assert_eq!(all.len(), 9);
        assert_eq!(all[0].alpha(), &[0, 0]);
        assert_eq!(all[1].alpha(), &[0, 1]);
        assert_eq!(all[8].alpha(), &[2, 2]);
        assert!(SovIndex::new(vec![0, 3], 2).is_err());
        assert_eq!(all[5].reflected(2).alpha(), &[1, 0]);
        assert_eq!(all[5].to_string(), "(1,2)");
    }

    #[test]
    fn beta_grid_zeros() {
        for s in configs() {
            let g = s.gauged();
            for (&b, &bp) in s.grid().beta.iter().zip(&s.grid().beta_prime) {
                assert!(g.d_fn(b).norm() < 1e-11);
                assert!(g.a_fn(bp).norm() < 1e-11);
            }
        }
    }

    #[test]
    fn zero_index_is_omega() {
        let s = sov(2, &[0.31, -0.17]);
        let z = SovIndex::zero(2);
        assert_eq!(s.right(&z).unwrap(), s.states().omega);
        assert_eq!(s.left(&z).unwrap(), s.states().omega_bar);
        assert_eq!(s.vac_ratio(&z).unwrap(), cr(1.0));
    }

    #[test]
    fn c_eigenbasis() {
        let us = [c64::new(0.37, 0.22), c64::new(-0.61, 0.13), c64::new(0.2, -0.8), c64::new(1.1, 0.4)];
        for s in configs() {
            for idx in s.indices() {
                for &u in &us {
                    let (r, l) = s.c_eigen_residuals(u, &idx).unwrap();
                    assert!(r < 1e-9 && l < 1e-9, "{idx}: {r:e} {l:e}");
                }
            }
        }
    }

    #[test]
    fn basis_nonsingular_and_reflected_pairing() {
        for s in configs() {
            let cond = s.right_condition().unwrap();
            assert!(cond.is_finite() && cond < 1e10, "cond {cond:e}");
            let p = s.pairing().unwrap();
            assert!(p.reflected_leakage < 1e-7, "{p:?}");
            assert!(p.min_diagonal > 1e-6, "{p:?}");
        }
    }

    #[test]
    fn dbar_relations() {
        for s in configs() {
            assert!(s.dbar_omega_residual().unwrap() < 1e-10);
            for u in [c64::new(0.37, 0.22), c64::new(-0.9, 0.5)] {
                assert!(s.quantum_determinant_residual(u).unwrap() < 1e-9);
            }
            let tw = s.gauged().chain().spin().twice();
            for idx in s.indices() {
                for n in 0..idx.sites() {
                    for m in 1..=tw {
                        let r = s.dbar_action_residual(&idx, n, m).unwrap();
                        assert!(r < 1e-9, "{idx} n={n} m={m}: {r:e}");
                    }
                }
            }
        }
    }

    #[test]
    fn dbar_pole() {
        let s = sov(1, &[0.31]);
        assert!(matches!(s.dbar(cr(-0.5)), Err(WorkbenchError::Pole { .. })));
    }

    #[test]
    fn vacuum_overlaps() {
        for s in configs() {
            let tw = s.gauged().chain().spin().twice();
            for idx in s.indices() {
                let direct = s.vac_ratio(&idx).unwrap();
                let formula = s.vac_ratio_formula(&idx).unwrap();
                assert!((direct - formula).norm() < 1e-9 * formula.norm().max(1.0), "{idx}");
                for n in 0..idx.sites() {
                    for m in 1..=tw {
                        assert!(s.vac_annihilation_residual(&idx, n, m).unwrap() < 1e-10);
                        assert!(s.vac_c_relation_residual(&idx, n, m).unwrap() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn recursion_with_numerical_eigenvalues() {
        for s in configs() {
            let chain = s.gauged().chain();
            let ustar = c64::new(0.43, 0.29);
            let es = eigenpairs(&chain.transfer_half(ustar).unwrap()).unwrap();
            let tw = chain.spin().twice();
            for pair in &es.pairs {
                let psi = &pair.left;
                let right = &pair.right;
                let norm = psi.dot(right);
                let lambda = |u: c64| psi.dot(&chain.transfer_half(u).unwrap().mul_vec(right)) / norm;
                for idx in s.indices() {
                    for n in 0..idx.sites() {
                        if idx.alpha()[n] == 0 {
                            let r = s.initial_condition_residual(psi, lambda, &idx, n).unwrap();
                            assert!(r < 1e-8, "initial {idx}: {r:e}");
                        }
                        for m in 1..tw {
                            if idx.alpha()[n] == m {
                                let r = s.recursion_residual(psi, lambda, &idx, n, m).unwrap();
                                assert!(r < 1e-8, "recursion {idx} m={m}: {r:e}");
                            }
                        }
                    }
                }
            }
        }
    }
}
