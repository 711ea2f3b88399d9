//! Bethe states from extracted Bethe roots and the end-to-end pipeline
//! spectrum → Q → roots → states.

use crate::error::{Result, WorkbenchError};
use crate::gauge::GaugedChain;
use crate::linalg::{c64, rel_diff_vec, CVector};
use crate::sampling::Sampler;
use crate::sov::BetaGrid;
use crate::spectrum::{track_eigenvalues, Spectrum};
use crate::tq::{canonical_root, QPolynomial, TqFunctions};
use crate::transfer::{Chain, ModelParams};

/// Denominator magnitude below which normalization is dropped.
pub const NORMALIZATION_FLOOR: f64 = 1e-8;

/// A Bethe vector together with whether the per-root normalization was applied.
#[derive(Clone, Debug)]
pub struct BetheVector {
    pub vector: CVector,
    pub normalized: bool,
}

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn apply_roots(
    g: &GaugedChain,
    roots: &[c64],
    normalize: bool,
    step: impl Fn(&GaugedChain, c64, &CVector) -> Result<(CVector, f64, c64)>,
) -> Result<BetheVector> {
    let mut v = g.product_states()?.vac;
    let mut dens = Vec::with_capacity(roots.len());
    for &l in roots {
        let (next, op_norm, den) = step(g, l, &v)?;
        if next.norm() <= 1e-13 * op_norm * v.norm() {
            return Err(WorkbenchError::DegenerateState { root: l });
        }
        v = next;
        dens.push(den);
    }
    let normalized = normalize && dens.iter().all(|d| d.norm() >= NORMALIZATION_FLOOR);
    if normalized {
        let f: c64 = dens.iter().product();
        v = v.scale(f.inv());
    }
    Ok(BetheVector { vector: v, normalized })
}

/// `Π_j ℬ̃(λ_j)/((−1)^N K̃⁻₁₂(λ_j) a(λ_j) a(−λ_j−η)) |0⟩`.
pub fn bethe_state_right(g: &GaugedChain, roots: &[c64], normalize: bool) -> Result<BetheVector> {
    let e = g.chain().eta();
    let sg = sign(g.chain().sites());
    apply_roots(g, roots, normalize, |g, l, v| {
        let b = g.double_row(l)?.b;
        let den = g.k_minus(l)[(0, 1)] * g.a_fn(l) * g.a_fn(-l - e) * sg;
        Ok((b.mul_vec(v), b.norm(), den))
    })
}

/// `⟨0| Π_j 𝒞̃(λ_j)/((−1)^N K̃⁻₂₁(λ_j) d(λ_j) d(−λ_j−η))`, as a bilinear bra.
pub fn bethe_state_left(g: &GaugedChain, roots: &[c64], normalize: bool) -> Result<BetheVector> {
    let e = g.chain().eta();
    let sg = sign(g.chain().sites());
    apply_roots(g, roots, normalize, |g, l, v| {
        let c = g.double_row(l)?.c;
        let den = g.k_minus(l)[(1, 0)] * g.d_fn(l) * g.d_fn(-l - e) * sg;
        Ok((c.vec_mul(v), c.norm(), den))
    })
}

/// Largest `‖t(u)v − Λ(u)v‖ / (‖t(u)‖‖v‖)` over `points`; `left` selects the
/// row action `vᵀ t(u)`.
pub fn verify_eigenstate(
    chain: &Chain,
    v: &CVector,
    lambda: impl Fn(c64) -> Result<c64>,
    points: &[c64],
    left: bool,
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &u in points {
        let t = chain.transfer_half(u)?;
        let tv = if left { t.vec_mul(v) } else { t.mul_vec(v) };
        let r = (&tv - &v.scale(lambda(u)?)).norm() / (t.norm() * v.norm());
        worst = worst.max(r);
    }
    Ok(worst)
}

/// `|⟨a, b⟩| / (‖a‖‖b‖)` with the Hermitian inner product.
pub fn fidelity(a: &CVector, b: &CVector) -> f64 {
    a.inner(b).norm() / (a.norm() * b.norm())
}

/// Relative difference between Bethe states built from `roots` and from the
/// reversed list.
pub fn order_invariance_residual(g: &GaugedChain, roots: &[c64]) -> Result<(f64, f64)> {
    let rev: Vec<c64> = roots.iter().rev().cloned().collect();
    let r1 = bethe_state_right(g, roots, false)?.vector;
    let r2 = bethe_state_right(g, &rev, false)?.vector;
    let l1 = bethe_state_left(g, roots, false)?.vector;
    let l2 = bethe_state_left(g, &rev, false)?.vector;
    Ok((rel_diff_vec(&r1, &r2), rel_diff_vec(&l1, &l2)))
}

/// Pipeline options.
#[derive(Clone, Debug)]
pub struct BetheOptions {
    /// Least-squares sample count; raised to at least `2M + 4`.
    pub samples: usize,
    pub held_out: usize,
    pub verify_points: usize,
    pub seed: u64,
    /// Fit residual above which extraction is declared failed.
    pub extraction_tol: f64,
}

impl Default for BetheOptions {
    fn default() -> Self {
        Self {
            samples: 0,
            held_out: 10,
            verify_points: 5,
            seed: 42,
            extraction_tol: 1e-6,
        }
    }
}

/// Per-eigenstate outcome.
#[derive(Clone, Debug)]
pub struct BetheSolution {
    pub index: usize,
    /// Eigenvalue at the reference point.
    pub value: c64,
    pub samples: Vec<(c64, c64)>,
    pub q: QPolynomial,
    pub roots: Vec<c64>,
    pub tq_residual: f64,
    /// Largest relative mismatch of the T-Q eigenvalue at held-out points.
    pub held_out_residual: f64,
    /// BAE residuals of the extracted roots before refinement.
    pub raw_bae_residuals: Vec<f64>,
    pub bae_residuals: Vec<f64>,
    pub newton_iterations: usize,
    pub newton_converged: bool,
    pub states: Option<StateCheck>,
}

impl BetheSolution {
    pub fn max_bae(&self) -> f64 {
        self.bae_residuals.iter().cloned().fold(0.0, f64::max)
    }
}

/// Comparison of Bethe vectors with the exact eigenvectors.
#[derive(Clone, Debug)]
pub struct StateCheck {
    pub right_fidelity: f64,
    pub left_fidelity: f64,
    pub right_residual: f64,
    pub left_residual: f64,
    pub normalized: bool,
    pub right: CVector,
    pub left: CVector,
}

impl StateCheck {
    pub fn fidelity(&self) -> f64 {
        self.right_fidelity.min(self.left_fidelity)
    }

    pub fn residual(&self) -> f64 {
        self.right_residual.max(self.left_residual)
    }
}

/// Whole-spectrum report.
#[derive(Clone, Debug)]
pub struct BetheReport {
    pub spectrum: Spectrum,
    pub solutions: Vec<Result<BetheSolution>>,
    pub fit_points: Vec<c64>,
    pub held_points: Vec<c64>,
}

/// Sample-point exclusions: `±η/2` and the β-grids with their mirrors.
fn excluded_points(params: &ModelParams) -> Vec<c64> {
    let e = params.eta;
    let grid = BetaGrid::new(params);
    let mut avoid = vec![e * 0.5, -e * 0.5];
    for &b in grid.beta.iter().chain(&grid.beta_prime) {
        avoid.push(b);
        avoid.push(-b - e);
    }
    avoid
}

/// Tracks the spectrum, extracts Q and the Bethe roots for every eigenstate,
/// refines them and, when `ς = 0`, builds and checks the Bethe vectors.
pub fn solve(params: &ModelParams, opts: &BetheOptions) -> Result<BetheReport> {
    let chain = Chain::new(params.clone())?;
    let tq = TqFunctions::new(params);
    let m = tq.degree();
    let scale = params.eta.norm();
    let mut sampler = Sampler::new(opts.seed);
    let n_fit = opts.samples.max(2 * m + 4);
    let avoid = excluded_points(params);
    let all = sampler.points(n_fit + opts.held_out, 0.5, 1.5, scale, &avoid, 0.05 * scale);
    let (fit_points, held_points) = all.split_at(n_fit);
    let spectrum = track_eigenvalues(&chain, &all, &mut sampler)?;
    let verify: Vec<c64> = (0..opts.verify_points).map(|_| sampler.annulus(0.3, 1.2, scale)).collect();
    let gauged = match GaugedChain::new(params.clone()) {
        Ok(g) => Some(g),
        Err(WorkbenchError::Unsupported(_)) | Err(WorkbenchError::GaugeSingular { .. }) => None,
        Err(e) => return Err(e),
    };

    let solutions = spectrum
        .tracks
        .iter()
        .map(|track| {
            let (fit_s, held_s) = track.samples.split_at(n_fit);
            let fit = tq.extract_q(fit_s)?;
            if !(fit.residual <= opts.extraction_tol) {
                return Err(WorkbenchError::ExtractionFailed {
                    residual: fit.residual,
                    tol: opts.extraction_tol,
                });
            }
            let mut held_out_residual: f64 = 0.0;
            for &(u, lam) in held_s {
                let l = tq.lambda(u, &fit.q)?;
                held_out_residual = held_out_residual.max((l - lam).norm() / lam.norm().max(f64::MIN_POSITIVE));
            }
            let raw = fit.q.bethe_roots()?;
            let raw_bae_residuals = tq.bae_residuals(&raw)?;
            let refined = tq.newton_refine(&raw)?;
            let roots: Vec<c64> = refined.roots.iter().map(|&l| canonical_root(l, params.eta)).collect();
            let bae_residuals = tq.bae_residuals(&roots)?;
            let q = QPolynomial::from_roots(&roots, params.eta);
            let states = match &gauged {
                Some(g) => Some(check_states(g, &tq, &q, &roots, track, &verify)?),
                None => None,
            };
            Ok(BetheSolution {
                index: track.index,
                value: track.value,
                samples: track.samples.clone(),
                q,
                roots,
                tq_residual: fit.residual,
                held_out_residual,
                raw_bae_residuals,
                bae_residuals,
                newton_iterations: refined.iterations,
                newton_converged: refined.converged,
                states,
            })
        })
        .collect();
    Ok(BetheReport {
        spectrum,
        solutions,
        fit_points: fit_points.to_vec(),
        held_points: held_points.to_vec(),
    })
}

fn check_states(
    g: &GaugedChain,
    tq: &TqFunctions,
    q: &QPolynomial,
    roots: &[c64],
    track: &crate::spectrum::EigenTrack,
    verify: &[c64],
) -> Result<StateCheck> {
    let right = bethe_state_right(g, roots, true)?;
    let left = bethe_state_left(g, roots, true)?;
    let lam = |u: c64| tq.lambda(u, q);
    Ok(StateCheck {
        right_fidelity: fidelity(&right.vector, &track.right),
        left_fidelity: fidelity(&left.vector, &track.left),
        right_residual: verify_eigenstate(g.chain(), &right.vector, lam, verify, false)?,
        left_residual: verify_eigenstate(g.chain(), &left.vector, lam, verify, true)?,
        normalized: right.normalized && left.normalized,
        right: right.vector,
        left: left.vector,
    })
}
