use faer::linalg::solvers::DenseSolveCore;

use super::{c64, cr, max_hilbert_dim, CMatrix, CVector};
use crate::error::{Result, WorkbenchError};

/// One eigenvalue with its right vector and bilinear left vector.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: c64,
    /// Unit 2-norm right eigenvector.
    pub right: CVector,
    /// Left eigenvector, `leftᵀ M = value leftᵀ`, scaled so `leftᵀ right = 1`.
    pub left: CVector,
}

/// Eigen-decomposition of a general complex matrix.
#[derive(Clone, Debug)]
pub struct Eigensystem {
    /// Pairs sorted by real part, then imaginary part.
    pub pairs: Vec<EigenPair>,
    /// Groups of pair indices whose eigenvalues lie within the cluster gap.
    pub clusters: Vec<Vec<usize>>,
    /// Largest `‖M r − λ r‖ / ‖M‖` over all pairs.
    pub max_residual: f64,
    /// Largest off-diagonal `|leftᵢᵀ rightⱼ|`.
    pub biorthogonality: f64,
    /// Smallest eigenvalue separation relative to `‖M‖`.
    pub min_gap: f64,
}

impl Eigensystem {
    pub fn is_simple(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn values(&self) -> Vec<c64> {
        self.pairs.iter().map(|p| p.value).collect()
    }
}

/// Relative gap below which eigenvalues are treated as one cluster.
pub const CLUSTER_GAP: f64 = 1e-8;

const EIGEN_RESIDUAL_TOL: f64 = 1e-9;

/// Eigenpairs of a square matrix with biorthonormal bilinear left vectors.
///
/// Left vectors are the rows of the inverse right-eigenvector matrix, so they
/// pair with right vectors by plain transpose.
pub fn eigenpairs(m: &CMatrix) -> Result<Eigensystem> {
    if !m.is_square() {
        return Err(WorkbenchError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let cap = max_hilbert_dim();
    if n > cap {
        return Err(WorkbenchError::DimensionTooLarge { dim: n, cap });
    }
    if !m.is_finite() {
        return Err(WorkbenchError::EigenFailure("matrix has non-finite entries".into()));
    }
    let scale = m.norm().max(f64::MIN_POSITIVE);
    let evd = m
        .to_faer()
        .eigen()
        .map_err(|e| WorkbenchError::EigenFailure(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        s[a].re
            .total_cmp(&s[b].re)
            .then(s[a].im.total_cmp(&s[b].im))
    });

    let mut rights: Vec<CVector> = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for &k in &order {
        let v = CVector::from_vec((0..n).map(|i| u[(i, k)]).collect());
        rights.push(v.normalized());
        values.push(s[k]);
    }

    let mut max_residual: f64 = 0.0;
    for (v, &lam) in rights.iter().zip(&values) {
        let mut r = m.mul_vec(v);
        r.axpy(-lam, v);
        max_residual = max_residual.max(r.norm() / scale);
    }
    if !(max_residual <= EIGEN_RESIDUAL_TOL) {
        return Err(WorkbenchError::EigenFailure(format!(
            "eigenpair residual {max_residual:.3e} exceeds {EIGEN_RESIDUAL_TOL:.1e}"
        )));
    }

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut min_gap = f64::INFINITY;
    let mut assigned = vec![false; n];
    for i in 0..n {
        for j in (i + 1)..n {
            min_gap = min_gap.min((values[i] - values[j]).norm() / scale);
        }
        if assigned[i] {
            continue;
        }
        let mut group = vec![i];
        let mut k = 0;
        while k < group.len() {
            let a = group[k];
            for b in 0..n {
                if !assigned[b]
                    && b != a
                    && !group.contains(&b)
                    && (values[a] - values[b]).norm() < CLUSTER_GAP * scale
                {
                    group.push(b);
                }
            }
            k += 1;
        }
        for &g in &group {
            assigned[g] = true;
        }
        if group.len() > 1 {
            group.sort_unstable();
            clusters.push(group);
        }
    }

    let vmat = CMatrix::from_columns(&rights);
    let lefts_mat = inverse(&vmat);
    let (lefts, biorthogonality) = match lefts_mat {
        Ok(w) => {
            let lefts: Vec<CVector> = (0..n).map(|i| w.row(i)).collect();
            let mut off: f64 = 0.0;
            for (i, l) in lefts.iter().enumerate() {
                for (j, r) in rights.iter().enumerate() {
                    if i != j {
                        off = off.max(l.dot(r).norm());
                    }
                }
            }
            (lefts, off)
        }
        Err(_) if !clusters.is_empty() => {
            // Defective cluster: fall back to left vectors of the transpose.
            let lefts = fallback_lefts(m, &values)?;
            (lefts, f64::INFINITY)
        }
        Err(e) => return Err(e),
    };

    let pairs = values
        .into_iter()
        .zip(rights)
        .zip(lefts)
        .map(|((value, right), left)| EigenPair { value, right, left })
        .collect();
    Ok(Eigensystem {
        pairs,
        clusters,
        max_residual,
        biorthogonality,
        min_gap: if n > 1 { min_gap } else { f64::INFINITY },
    })
}

fn fallback_lefts(m: &CMatrix, values: &[c64]) -> Result<Vec<CVector>> {
    let t = m.transpose().to_faer();
    let evd = t
        .eigen()
        .map_err(|e| WorkbenchError::EigenFailure(format!("{e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let n = m.rows();
    Ok(values
        .iter()
        .map(|&lam| {
            let k = (0..n)
                .min_by(|&a, &b| (s[a] - lam).norm().total_cmp(&(s[b] - lam).norm()))
                .unwrap_or(0);
            CVector::from_vec((0..n).map(|i| u[(i, k)]).collect()).normalized()
        })
        .collect())
}

/// Inverse of a square matrix by LU with partial pivoting.
///
/// Fails when the reconstruction `‖M M⁻¹ − I‖` shows the matrix is
/// numerically singular.
pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(WorkbenchError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    let inv = CMatrix::from_faer(m.to_faer().partial_piv_lu().inverse().as_ref());
    let check = &m.matmul(&inv) - &CMatrix::identity(n);
    let defect = check.norm() / (n as f64).sqrt();
    if !inv.is_finite() || !(defect < 1e-6) {
        return Err(WorkbenchError::SingularConfiguration(format!(
            "matrix is numerically singular (inverse defect {defect:.3e})"
        )));
    }
    Ok(inv)
}

/// Singular values in nonincreasing order.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    m.to_faer()
        .singular_values()
        .map_err(|e| WorkbenchError::EigenFailure(format!("svd: {e:?}")))
}

/// Least-squares solution of `A x ≈ b`.
#[derive(Clone, Debug)]
pub struct Lstsq {
    pub x: CVector,
    /// `‖A x − b‖₂`.
    pub residual: f64,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

impl Lstsq {
    /// `σ_min / σ_max` of the system matrix.
    pub fn reciprocal_condition(&self) -> f64 {
        match (self.singular_values.first(), self.singular_values.last()) {
            (Some(&hi), Some(&lo)) if hi > 0.0 => lo / hi,
            _ => 0.0,
        }
    }
}

/// Relative singular-value threshold used to decide the effective rank.
pub const RANK_TOL: f64 = 1e-13;

/// Minimizes `‖A x − b‖₂` through a thin SVD.
pub fn lstsq(a: &CMatrix, b: &CVector) -> Result<Lstsq> {
    let (m, n) = (a.rows(), a.cols());
    if b.dim() != m {
        return Err(WorkbenchError::DimensionMismatch {
            context: "lstsq right-hand side",
            expected: m,
            found: b.dim(),
        });
    }
    if m < n {
        return Err(WorkbenchError::DimensionMismatch {
            context: "lstsq requires rows >= cols",
            expected: n,
            found: m,
        });
    }
    let svd = a
        .to_faer()
        .thin_svd()
        .map_err(|e| WorkbenchError::EigenFailure(format!("svd: {e:?}")))?;
    let (u, v) = (svd.U(), svd.V());
    let sv: Vec<f64> = (0..n).map(|k| svd.S().column_vector()[k].re).collect();
    let smax = sv.first().copied().unwrap_or(0.0);
    let rank = sv
        .iter()
        .filter(|&&x| x > RANK_TOL * (m.max(n) as f64) * smax)
        .count();
    if rank < n {
        return Err(WorkbenchError::RankDeficient { rank, cols: n });
    }
    let mut x = CVector::zeros(n);
    for k in 0..n {
        let proj: c64 = (0..m).map(|i| u[(i, k)].conj() * b[i]).sum();
        let coef = proj / cr(sv[k]);
        for i in 0..n {
            x[i] += v[(i, k)] * coef;
        }
    }
    let mut r = a.mul_vec(&x);
    r.axpy(cr(-1.0), b);
    Ok(Lstsq {
        x,
        residual: r.norm(),
        rank,
        singular_values: sv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rows: usize, cols: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(rows, cols, |_, _| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn diagonal_and_swap() {
        let es = eigenpairs(&CMatrix::diag(&[cr(1.0), cr(2.0)])).unwrap();
        let v = es.values();
        assert!((v[0] - cr(1.0)).norm() < 1e-14 && (v[1] - cr(2.0)).norm() < 1e-14);
        let x = CMatrix::from_2x2(cr(0.0), cr(1.0), cr(1.0), cr(0.0));
        let v = eigenpairs(&x).unwrap().values();
        assert!((v[0] + cr(1.0)).norm() < 1e-14 && (v[1] - cr(1.0)).norm() < 1e-14);
    }

    #[test]
    fn random_residual_trace_biorthogonality() {
        let m = random(8, 8, 11);
        let es = eigenpairs(&m).unwrap();
        assert!(es.max_residual < 1e-10);
        assert!(es.is_simple());
        let tr: c64 = es.values().iter().sum();
        assert!((tr - m.trace()).norm() / m.trace().norm().max(1.0) < 1e-10);
        assert!(es.biorthogonality < 1e-8);
        for p in &es.pairs {
            let lhs = m.vec_mul(&p.left);
            let defect = (&lhs - &p.left.scale(p.value)).norm() / (m.norm() * p.left.norm());
            assert!(defect < 1e-10);
            assert!((p.left.dot(&p.right) - cr(1.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn degenerate_cluster_flagged() {
        let m = CMatrix::diag(&[cr(1.0), cr(1.0), cr(3.0)]);
        let es = eigenpairs(&m).unwrap();
        assert_eq!(es.clusters, vec![vec![0, 1]]);
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(
            eigenpairs(&CMatrix::zeros(2, 3)),
            Err(WorkbenchError::NotSquare { .. })
        ));
    }

    #[test]
    fn lstsq_identity() {
        let b = CVector::from_vec(vec![c64::new(1.0, 2.0), c64::new(-3.0, 0.5), cr(4.0)]);
        let s = lstsq(&CMatrix::identity(3), &b).unwrap();
        assert!((&s.x - &b).norm() < 1e-15);
        assert!(s.residual < 1e-15);
    }

    #[test]
    fn lstsq_consistent_overdetermined() {
        let a = random(9, 4, 12);
        let x0 = CVector::from_vec(vec![c64::new(0.3, -1.0), cr(2.0), c64::new(0.0, 0.7), cr(-1.1)]);
        let b = a.mul_vec(&x0);
        let s = lstsq(&a, &b).unwrap();
        assert!((&s.x - &x0).norm() < 1e-12);
        assert_eq!(s.rank, 4);
    }

    #[test]
    fn lstsq_inconsistent_residual_is_orthogonal_part() {
        // Columns span e0, e1; the e2 component of b cannot be reached.
        let a = CMatrix::from_fn(3, 2, |i, j| if i == j { cr(1.0) } else { cr(0.0) });
        let b = CVector::from_vec(vec![cr(1.0), c64::new(0.0, 2.0), c64::new(3.0, 4.0)]);
        let s = lstsq(&a, &b).unwrap();
        assert!((s.residual - 5.0).abs() < 1e-14);
        assert!((s.x[1] - c64::new(0.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn lstsq_rank_deficiency_reported() {
        let a = CMatrix::from_fn(4, 2, |i, _| cr(i as f64 + 1.0));
        let b = CVector::zeros(4);
        assert!(matches!(
            lstsq(&a, &b),
            Err(WorkbenchError::RankDeficient { rank: 1, cols: 2 })
        ));
    }

    #[test]
    fn inverse_roundtrip_and_singular() {
        let m = random(5, 5, 13);
        let inv = inverse(&m).unwrap();
        assert!((&m.matmul(&inv) - &CMatrix::identity(5)).max_abs() < 1e-12);
        let sing = CMatrix::from_fn(3, 3, |i, j| cr((i + j) as f64));
        assert!(inverse(&sing).is_err());
    }

    #[test]
    fn singular_values_sorted() {
        let s = singular_values(&CMatrix::diag(&[cr(1.0), cr(-3.0), c64::new(0.0, 2.0)])).unwrap();
        assert!((s[0] - 3.0).abs() < 1e-14 && (s[1] - 2.0).abs() < 1e-14 && (s[2] - 1.0).abs() < 1e-14);
    }
}
