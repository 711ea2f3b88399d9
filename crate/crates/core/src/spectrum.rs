//! Labelled eigenvalue curves `Λᵢ(u)` of the spin-(1/2, s) transfer matrix.

use crate::error::{Result, WorkbenchError};
use crate::linalg::{c64, eigenpairs, CMatrix, CVector, Eigensystem};
use crate::sampling::Sampler;
use crate::transfer::Chain;

/// Maximum number of reference points tried before giving up on a
/// non-degenerate spectrum.
pub const MAX_REFERENCE_ATTEMPTS: usize = 5;

/// One eigenstate followed across spectral parameters.
#[derive(Clone, Debug)]
pub struct EigenTrack {
    pub index: usize,
    /// Eigenvalue at the reference point.
    pub value: c64,
    pub right: CVector,
    /// Left eigenvector with `leftᵀ right = 1`.
    pub left: CVector,
    /// `(u, Λ(u))` pairs in the order of the requested points.
    pub samples: Vec<(c64, c64)>,
    /// Largest `‖t(u) r − Λ(u) r‖ / (‖t(u)‖ ‖r‖)` over the samples.
    pub max_residual: f64,
}

#[derive(Clone, Debug)]
pub struct Spectrum {
    pub reference: c64,
    pub attempts: usize,
    pub min_gap: f64,
    pub biorthogonality: f64,
    pub tracks: Vec<EigenTrack>,
    /// Largest relative defect of `Σᵢ Λᵢ(u) = tr t(u)`.
    pub trace_residual: f64,
}

impl Spectrum {
    pub fn values_at(&self, k: usize) -> Vec<c64> {
        self.tracks.iter().map(|t| t.samples[k].1).collect()
    }
}

/// Diagonalizes `t(u*)` at a random `u*` and evaluates every eigenvalue curve
/// at `points` through `Λᵢ(u) = leftᵢᵀ t(u) rightᵢ`.
pub fn track_eigenvalues(chain: &Chain, points: &[c64], sampler: &mut Sampler) -> Result<Spectrum> {
    let scale = chain.eta().norm();
    let mut last_err = None;
    for attempt in 1..=MAX_REFERENCE_ATTEMPTS {
        let ustar = sampler.annulus(0.3, 0.9, scale);
        let es = match eigenpairs(&chain.transfer_half(ustar)?) {
            Ok(es) => es,
            Err(e) => {
                last_err = Some(e);
                continue;
            }
        };
        if let Some(c) = es.clusters.first() {
            last_err = Some(WorkbenchError::DegenerateCluster {
                value: es.pairs[c[0]].value,
                size: c.len(),
                gap: es.min_gap,
            });
            continue;
        }
        return follow(chain, points, ustar, attempt, es);
    }
    Err(last_err.expect("at least one attempt"))
}

fn follow(chain: &Chain, points: &[c64], ustar: c64, attempts: usize, es: Eigensystem) -> Result<Spectrum> {
    let ts: Vec<CMatrix> = points.iter().map(|&u| chain.transfer_half(u)).collect::<Result<_>>()?;
    let mut tracks: Vec<EigenTrack> = es
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| EigenTrack {
            index: i,
            value: p.value,
            right: p.right.clone(),
            left: p.left.clone(),
            samples: Vec::with_capacity(points.len()),
            max_residual: 0.0,
        })
        .collect();
    let mut trace_residual: f64 = 0.0;
    for (&u, t) in points.iter().zip(&ts) {
        let mut sum = c64::new(0.0, 0.0);
        for tr in &mut tracks {
            let tv = t.mul_vec(&tr.right);
            let lam = tr.left.dot(&tv);
            let res = (&tv - &tr.right.scale(lam)).norm() / (t.norm() * tr.right.norm());
            tr.max_residual = tr.max_residual.max(res);
            tr.samples.push((u, lam));
            sum += lam;
        }
        let tr_t = t.trace();
        trace_residual = trace_residual.max((sum - tr_t).norm() / tr_t.norm().max(t.norm()));
    }
    Ok(Spectrum {
        reference: ustar,
        attempts,
        min_gap: es.min_gap,
        biorthogonality: es.biorthogonality,
        tracks,
        trace_residual,
    })
}
