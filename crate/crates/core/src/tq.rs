//! Inhomogeneous T-Q relation, Q-polynomials and the Bethe equations.

use crate::error::{Result, WorkbenchError};
use crate::linalg::{c64, cr, lstsq, poly_roots, CMatrix, CVector, Polynomial};
use crate::rmatrix::check_pole;
use crate::transfer::ModelParams;

/// Product of affine factors `Π (αᵢ u + βᵢ)` with its derivative.
#[derive(Clone, Debug, Default)]
struct Affine(Vec<(c64, c64)>);

impl Affine {
    fn push(&mut self, slope: c64, offset: c64) {
        self.0.push((slope, offset));
    }

    fn value(&self, u: c64) -> c64 {
        self.0.iter().map(|&(a, b)| a * u + b).product()
    }

    fn derivative(&self, u: c64) -> c64 {
        let vals: Vec<c64> = self.0.iter().map(|&(a, b)| a * u + b).collect();
        let n = vals.len();
        let mut prefix = vec![cr(1.0); n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] * vals[i];
        }
        let mut suffix = cr(1.0);
        let mut out = cr(0.0);
        for i in (0..n).rev() {
            out += self.0[i].0 * prefix[i] * suffix;
            suffix *= vals[i];
        }
        out
    }
}

/// The functions `a⁽ˢ⁾`, `d⁽ˢ⁾`, `F⁽ˢ⁾` and the constant `c` of the T-Q relation.
#[derive(Clone, Debug)]
pub struct TqFunctions {
    eta: c64,
    /// `(r₁u + q)(r₂u + p) Π (u ∓ θ + (1/2 + s)η)`.
    a_core: Affine,
    f: Affine,
    c: c64,
    p: c64,
    q: c64,
    theta: Vec<c64>,
    s: f64,
    degree: usize,
}

impl TqFunctions {
    pub fn new(params: &ModelParams) -> Self {
        let e = params.eta;
        let s = params.spin.value();
        let b = &params.boundary;
        let r1 = (b.xi * b.xi + 1.0).sqrt();
        let r2 = (b.varsigma * b.varsigma + 1.0).sqrt();
        let one = cr(1.0);
        let mut a_core = Affine::default();
        a_core.push(r1, b.q);
        a_core.push(r2, b.p);
        let mut f = Affine::default();
        for &t in &params.theta {
            a_core.push(one, -t + e * (0.5 + s));
            a_core.push(one, t + e * (0.5 + s));
            for k in 0..=params.spin.twice() {
                let shift = e * (0.5 - s + k as f64);
                f.push(one, -t + shift);
                f.push(one, t + shift);
            }
        }
        Self {
            eta: e,
            a_core,
            f,
            c: (b.varsigma * b.xi - 1.0 - r1 * r2) * 2.0,
            p: b.p,
            q: b.q,
            theta: params.theta.clone(),
            s,
            degree: params.spin.twice() as usize * params.sites(),
        }
    }

    pub fn eta(&self) -> c64 {
        self.eta
    }

    /// Number of Bethe roots, `2sN`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn c(&self) -> c64 {
        self.c
    }

    fn ratio(&self, u: c64) -> c64 {
        (u * 2.0 + self.eta * 2.0) / (u * 2.0 + self.eta)
    }

    fn ratio_derivative(&self, u: c64) -> c64 {
        let den = u * 2.0 + self.eta;
        -self.eta * 2.0 / (den * den)
    }

    pub fn a(&self, u: c64) -> c64 {
        self.ratio(u) * self.a_core.value(u)
    }

    pub fn d(&self, u: c64) -> c64 {
        self.a(-u - self.eta)
    }

    pub fn f(&self, u: c64) -> c64 {
        self.f.value(u)
    }

    pub fn a_derivative(&self, u: c64) -> c64 {
        self.ratio_derivative(u) * self.a_core.value(u) + self.ratio(u) * self.a_core.derivative(u)
    }

    pub fn d_derivative(&self, u: c64) -> c64 {
        -self.a_derivative(-u - self.eta)
    }

    pub fn f_derivative(&self, u: c64) -> c64 {
        self.f.derivative(u)
    }

    /// `Λ(0) = 2pq Π (θ_l + (1/2+s)η)(−θ_l + (1/2+s)η)`.
    pub fn value_at_zero(&self) -> c64 {
        let h = self.eta * (0.5 + self.s);
        self.theta.iter().fold(self.p * self.q * 2.0, |acc, &t| acc * (t + h) * (-t + h))
    }

    /// `Λ(u)` for a given Q.
    pub fn lambda(&self, u: c64, q: &QPolynomial) -> Result<c64> {
        let e = self.eta;
        let qu = q.eval(u);
        check_pole(|| "Q(u) in the T-Q relation".into(), qu, u, q.scale(u))?;
        check_pole(|| "2u + eta in a(u), d(u)".into(), u * 2.0 + e, u, e.norm())?;
        Ok((self.a(u) * q.eval(u - e) + self.d(u) * q.eval(u + e) + self.c * u * (u + e) * self.f(u)) / qu)
    }

    /// The three BAE terms at `λ`.
    fn bae_terms(&self, l: c64, q: &QPolynomial) -> [c64; 3] {
        let e = self.eta;
        [
            self.a(l) * q.eval(l - e),
            self.d(l) * q.eval(l + e),
            self.c * l * (l + e) * self.f(l),
        ]
    }

    /// `|aQ(λ−η) + dQ(λ+η) + cλ(λ+η)F(λ)|` relative to the largest term.
    pub fn bae_residual(&self, l: c64, q: &QPolynomial) -> f64 {
        let t = self.bae_terms(l, q);
        let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            0.0
        } else {
            t.iter().sum::<c64>().norm() / scale
        }
    }

    pub fn bae_residuals(&self, roots: &[c64]) -> Result<Vec<f64>> {
        let q = QPolynomial::from_roots(roots, self.eta);
        self.check_count(roots)?;
        Ok(roots.iter().map(|&l| self.bae_residual(l, &q)).collect())
    }

    fn check_count(&self, roots: &[c64]) -> Result<()> {
        if roots.len() != self.degree {
            return Err(WorkbenchError::DimensionMismatch {
                context: "number of Bethe roots",
                expected: self.degree,
                found: roots.len(),
            });
        }
        Ok(())
    }

    /// Fits the monic Q of degree `2sN` in `x = u(u+η)` to sampled `Λ(u_k)`.
    pub fn extract_q(&self, samples: &[(c64, c64)]) -> Result<QFit> {
        let m = self.degree;
        let e = self.eta;
        if m == 0 {
            return Err(WorkbenchError::DegreeZero);
        }
        if samples.len() < m {
            return Err(WorkbenchError::RankDeficient { rank: samples.len(), cols: m });
        }
        let x = |u: c64| u * (u + e);
        let mut rows = Vec::with_capacity(samples.len());
        let mut rhs = Vec::with_capacity(samples.len());
        for &(u, lam) in samples {
            let (a, d) = (self.a(u), self.d(u));
            let (x0, xm, xp) = (x(u), x(u - e), x(u + e));
            let term = |k: i32| lam * x0.powi(k) - a * xm.powi(k) - d * xp.powi(k);
            let row: Vec<c64> = (0..m as i32).map(term).collect();
            let w = row.iter().chain([&term(m as i32)]).map(|z| z.norm()).fold(1e-300, f64::max);
            rows.push(row.into_iter().map(|z| z / w).collect::<Vec<_>>());
            rhs.push((self.c * x0 * self.f(u) - term(m as i32)) / w);
        }
        let a = CMatrix::from_rows(&rows.into_iter().map(CVector::from_vec).collect::<Vec<_>>());
        let b = CVector::from_vec(rhs);
        let fit = lstsq(&a, &b)?;
        let rel = fit.residual / b.norm().max(1e-300);
        let mut coeffs = fit.x.into_vec();
        coeffs.push(cr(1.0));
        Ok(QFit {
            q: QPolynomial::new(Polynomial::new(coeffs), e),
            residual: rel,
            rank: fit.rank,
        })
    }

    /// Damped Newton on the coupled Bethe equations.
    pub fn newton_refine(&self, roots: &[c64]) -> Result<Refinement> {
        self.check_count(roots)?;
        let m = roots.len();
        let mut cur = roots.to_vec();
        let mut res = self.max_bae(&cur);
        let mut iterations = 0;
        while res > NEWTON_TOL && iterations < NEWTON_MAX_ITER {
            iterations += 1;
            let (g, jac) = self.newton_system(&cur);
            let step = match lstsq(&jac, &g) {
                Ok(s) => s.x,
                Err(_) => break,
            };
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..12 {
                let trial: Vec<c64> = (0..m).map(|i| cur[i] - step[i] * t).collect();
                let r = self.max_bae(&trial);
                if r.is_finite() && r < res {
                    cur = trial;
                    res = r;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Ok(Refinement {
            roots: cur,
            residual: res,
            iterations,
            converged: res <= NEWTON_TOL,
        })
    }

    fn max_bae(&self, roots: &[c64]) -> f64 {
        let q = QPolynomial::from_roots(roots, self.eta);
        roots.iter().map(|&l| self.bae_residual(l, &q)).fold(0.0, f64::max)
    }

    /// Row-scaled residual vector and Jacobian of the Bethe equations.
    fn newton_system(&self, roots: &[c64]) -> (CVector, CMatrix) {
        let e = self.eta;
        let m = roots.len();
        let pair = |u: c64, l: c64| (u - l) * (u + l + e);
        // Q(u) with the factor for root k removed.
        let q_without = |u: c64, k: usize| -> c64 {
            roots.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &l)| pair(u, l)).product()
        };
        let q_full = |u: c64| -> c64 { roots.iter().map(|&l| pair(u, l)).product() };
        let q_du = |u: c64| -> c64 {
            (0..m).map(|k| (u * 2.0 + e) * q_without(u, k)).sum()
        };
        let mut g = CVector::zeros(m);
        let mut jac = CMatrix::zeros(m, m);
        for j in 0..m {
            let l = roots[j];
            let (a, d, f) = (self.a(l), self.d(l), self.f(l));
            let (qm, qp) = (q_full(l - e), q_full(l + e));
            let terms = [a * qm, d * qp, self.c * l * (l + e) * f];
            let w = terms.iter().map(|z| z.norm()).fold(1e-300, f64::max);
            g[j] = terms.iter().sum::<c64>() / w;
            for k in 0..m {
                let dlk = -(roots[k] * 2.0 + e);
                let mut v = a * dlk * q_without(l - e, k) + d * dlk * q_without(l + e, k);
                if k == j {
                    v += self.a_derivative(l) * qm
                        + a * q_du(l - e)
                        + self.d_derivative(l) * qp
                        + d * q_du(l + e)
                        + self.c * ((l * 2.0 + e) * f + l * (l + e) * self.f_derivative(l));
                }
                jac[(j, k)] = v / w;
            }
        }
        (g, jac)
    }
}

pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITER: usize = 50;

/// Result of the least-squares Q fit.
#[derive(Clone, Debug)]
pub struct QFit {
    pub q: QPolynomial,
    /// `‖Ac − b‖ / ‖b‖` of the row-normalized system.
    pub residual: f64,
    pub rank: usize,
}

/// Outcome of Newton refinement.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub roots: Vec<c64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Monic Q stored as a polynomial in `x = u(u+η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QPolynomial {
    poly: Polynomial,
    eta: c64,
}

impl QPolynomial {
    pub fn new(poly: Polynomial, eta: c64) -> Self {
        Self { poly, eta }
    }

    /// `Π (u − λ_j)(u + λ_j + η)`.
    pub fn from_roots(roots: &[c64], eta: c64) -> Self {
        let xs: Vec<c64> = roots.iter().map(|&l| l * (l + eta)).collect();
        Self::new(Polynomial::from_roots(&xs), eta)
    }

    pub fn degree(&self) -> usize {
        self.poly.degree().unwrap_or(0)
    }

    pub fn x_poly(&self) -> &Polynomial {
        &self.poly
    }

    pub fn eval(&self, u: c64) -> c64 {
        self.poly.eval(u * (u + self.eta))
    }

    /// Magnitude scale for pole detection at `u`.
    fn scale(&self, u: c64) -> f64 {
        let x = (u * (u + self.eta)).norm().max(1.0);
        self.poly.coeffs().iter().enumerate().map(|(k, c)| c.norm() * x.powi(k as i32)).fold(0.0, f64::max)
    }

    /// Zeros `x_j` of Q in the x variable.
    pub fn x_roots(&self) -> Result<Vec<c64>> {
        poly_roots(&self.poly)
    }

    /// Bethe roots `λ_j = (−η + √(η² + 4x_j))/2`, canonicalized to
    /// `Re λ ≥ −Re η / 2`.
    pub fn bethe_roots(&self) -> Result<Vec<c64>> {
        let e = self.eta;
        Ok(self
            .x_roots()?
            .into_iter()
            .map(|x| canonical_root((-e + (e * e + x * 4.0).sqrt()) * 0.5, e))
            .collect())
    }
}

/// Picks the representative of `{λ, −λ−η}` with `Re λ ≥ −Re η/2`.
pub fn canonical_root(l: c64, eta: c64) -> c64 {
    let other = -l - eta;
    if l.re + eta.re / 2.0 >= -1e-14 * eta.norm() {
        l
    } else {
        other
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::BoundaryParams;
    use crate::spin::SpinLabel;
    use crate::transfer::Chain;
    use crate::linalg::eigenpairs;
    use crate::sampling::Sampler;

    fn params(tw: u32, theta: &[f64], vs: f64) -> ModelParams {
        ModelParams::new(
            SpinLabel::from_twice(tw).unwrap(),
            cr(1.0),
            BoundaryParams::new(cr(0.8), cr(vs), cr(1.2), cr(0.6)),
            theta.iter().map(|&t| cr(t)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn crossing_and_constant() {
        let p = params(2, &[0.31, -0.17], 0.0);
        let tq = TqFunctions::new(&p);
        for u in [c64::new(0.3, 0.2), c64::new(-1.1, 0.7)] {
            assert!((tq.d(u) - tq.a(-u - cr(1.0))).norm() < 1e-12 * tq.d(u).norm());
        }
        let r = (1.0f64 + 0.36).sqrt();
        assert!((tq.c() - cr(2.0 * (-1.0 - r))).norm() < 1e-14);
        let mut b = p.clone();
        b.boundary.xi = cr(0.0);
        assert!((TqFunctions::new(&b).c() - cr(-4.0)).norm() < 1e-14);
        let v = params(2, &[0.31, -0.17], 0.3);
        let r2 = (1.0f64 + 0.09).sqrt();
        assert!((TqFunctions::new(&v).c() - cr(2.0 * (0.3 * 0.6 - 1.0 - r * r2))).norm() < 1e-14);
    }

    #[test]
    fn f_zero_structure() {
        let p = params(2, &[0.31], 0.0);
        let tq = TqFunctions::new(&p);
        for k in 0..=2 {
            let z = cr(0.31) - cr(0.5 - 1.0 + k as f64);
            assert!(tq.f(z).norm() < 1e-14);
        }
        assert!(tq.f(cr(0.77)).norm() > 1e-3);
    }

    #[test]
    fn derivatives_match_differences() {
        let p = params(3, &[0.31], 0.2);
        let tq = TqFunctions::new(&p);
        let u = c64::new(0.41, -0.33);
        let h = 1e-6;
        let fd = |f: &dyn Fn(c64) -> c64| (f(u + h) - f(u - h)) / (2.0 * h);
        assert!((tq.a_derivative(u) - fd(&|x| tq.a(x))).norm() < 1e-6 * tq.a_derivative(u).norm());
        assert!((tq.d_derivative(u) - fd(&|x| tq.d(x))).norm() < 1e-6 * tq.d_derivative(u).norm());
        assert!((tq.f_derivative(u) - fd(&|x| tq.f(x))).norm() < 1e-6 * tq.f_derivative(u).norm());
    }

    #[test]
    fn q_polynomial_symmetry_and_roots() {
        let eta = cr(1.0);
        let roots = [c64::new(0.3, 0.7), c64::new(-0.2, -1.1)];
        let q = QPolynomial::from_roots(&roots, eta);
        for u in [c64::new(0.1, 0.4), c64::new(-2.0, 0.3)] {
            assert!((q.eval(u) - q.eval(-u - eta)).norm() < 1e-12 * q.eval(u).norm());
        }
        let mut back = q.bethe_roots().unwrap();
        back.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((back[0] - roots[1]).norm() < 1e-12 && (back[1] - roots[0]).norm() < 1e-12);
        assert!((canonical_root(c64::new(-0.9, 0.2), eta) - c64::new(-0.1, -0.2)).norm() < 1e-15);
    }

    fn tracked(p: &ModelParams, n: usize, seed: u64) -> (Vec<Vec<(c64, c64)>>, Chain) {
        let chain = Chain::new(p.clone()).unwrap();
        let es = eigenpairs(&chain.transfer_half(c64::new(0.43, 0.29)).unwrap()).unwrap();
        let mut s = Sampler::new(seed);
        let pts = s.points(n, 0.5, 1.5, 1.0, &[cr(-0.5), cr(0.5)], 0.05);
        let ts: Vec<CMatrix> = pts.iter().map(|&u| chain.transfer_half(u).unwrap()).collect();
        let tracks = es
            .pairs
            .iter()
            .map(|pr| {
                pts.iter()
                    .zip(&ts)
                    .map(|(&u, t)| (u, pr.left.dot(&t.mul_vec(&pr.right))))
                    .collect()
            })
            .collect();
        (tracks, chain)
    }

    #[test]
    fn single_root_matches_one_point_solve() {
        let p = params(1, &[0.31], 0.0);
        let tq = TqFunctions::new(&p);
        let (tracks, _) = tracked(&p, 8, 5);
        for tr in tracks {
            let fit = tq.extract_q(&tr).unwrap();
            // Q = x + c0 ⇒ c0 (Λ − a − d) = cxF − Λx + a x(u−η) + d x(u+η)
            let (u, lam) = tr[0];
            let e = cr(1.0);
            let x = |v: c64| v * (v + e);
            let c0 = (tq.c() * x(u) * tq.f(u) - lam * x(u) + tq.a(u) * x(u - e) + tq.d(u) * x(u + e))
                / (lam - tq.a(u) - tq.d(u));
            assert!((fit.q.x_poly().coeffs()[0] - c0).norm() < 1e-9 * c0.norm().max(1.0));
        }
    }

    #[test]
    fn extraction_and_refinement() {
        for (tw, theta) in [(1, vec![0.31, -0.17, 0.23]), (2, vec![0.31, -0.17]), (3, vec![0.31])] {
            let p = params(tw, &theta, 0.0);
            let tq = TqFunctions::new(&p);
            let m = tq.degree();
            let (tracks, _) = tracked(&p, 2 * m + 14, 11);
            for tr in tracks {
                let (fit_pts, held) = tr.split_at(2 * m + 4);
                let fit = tq.extract_q(fit_pts).unwrap();
                assert!(fit.residual < 1e-7, "fit {:e}", fit.residual);
                for &(u, lam) in held {
                    let l = tq.lambda(u, &fit.q).unwrap();
                    assert!((l - lam).norm() < 1e-7 * lam.norm());
                }
                assert!((tq.lambda(cr(0.0), &fit.q).unwrap() - tq.value_at_zero()).norm() < 1e-8 * tq.value_at_zero().norm());
                let roots = fit.q.bethe_roots().unwrap();
                assert_eq!(roots.len(), m);
                assert!(tq.bae_residuals(&roots).unwrap().iter().all(|&r| r < 1e-5));
                let refined = tq.newton_refine(&roots).unwrap();
                assert!(refined.residual < 1e-10, "{refined:?}");
                let perturbed: Vec<c64> = refined.roots.iter().map(|&l| l + 1e-3).collect();
                let back = tq.newton_refine(&perturbed).unwrap();
                assert!(back.residual < 1e-10, "{back:?}");
            }
        }
    }

    #[test]
    fn wrong_root_count() {
        let p = params(1, &[0.31, -0.17], 0.0);
        let tq = TqFunctions::new(&p);
        assert!(matches!(
            tq.newton_refine(&[cr(0.1)]),
            Err(WorkbenchError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn lambda_pole_at_root() {
        let eta = cr(1.0);
        let p = params(1, &[0.31], 0.0);
        let tq = TqFunctions::new(&p);
        let q = QPolynomial::from_roots(&[c64::new(0.2, 0.4)], eta);
        assert!(matches!(tq.lambda(c64::new(0.2, 0.4), &q), Err(WorkbenchError::Pole { .. })));
    }
}
