use proptest::prelude::*;

use workbench_core::boundary::{reflection_residual, BoundaryParams};
use workbench_core::gauge::GaugeData;
use workbench_core::linalg::{cr, eigenpairs, kron, poly_roots, rel_diff, CMatrix};
use workbench_core::rmatrix::{projector_spin_l, ybe_residual};
use workbench_core::sov::SovIndex;
use workbench_core::spin::{sym_projector, symmetric_isometry};
use workbench_core::tq::QPolynomial;
use workbench_core::{c64, Chain, ModelParams, SpinLabel};

fn complex(range: f64) -> impl Strategy<Value = c64> {
    (-range..range, -range..range).prop_map(|(re, im)| c64::new(re, im))
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    proptest::collection::vec(complex(1.0), rows * cols)
        .prop_map(move |v| CMatrix::from_row_major(rows, cols, v))
}

fn spin() -> impl Strategy<Value = SpinLabel> {
    (1u32..=3).prop_map(|t| SpinLabel::from_twice(t).unwrap())
}

fn away_from_zero(range: f64, gap: f64) -> impl Strategy<Value = c64> {
    complex(range).prop_filter("bounded away from zero", move |z| z.norm() > gap)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_is_associative(a in matrix(2, 3), b in matrix(3, 2), c in matrix(2, 2)) {
        let l = kron(&kron(&a, &b).unwrap(), &c).unwrap();
        let r = kron(&a, &kron(&b, &c).unwrap()).unwrap();
        prop_assert!(rel_diff(&l, &r) < 1e-15);
    }

    #[test]
    fn kron_mixed_product(a in matrix(2, 2), b in matrix(3, 3), c in matrix(2, 2), d in matrix(3, 3)) {
        let l = kron(&a, &b).unwrap().matmul(&kron(&c, &d).unwrap());
        let r = kron(&a.matmul(&c), &b.matmul(&d)).unwrap();
        prop_assert!(rel_diff(&l, &r) < 1e-14);
    }

    #[test]
    fn eigenpairs_trace_and_biorthogonality(m in matrix(6, 6)) {
        let es = eigenpairs(&m).unwrap();
        let sum: c64 = es.values().iter().sum();
        prop_assert!((sum - m.trace()).norm() < 1e-10 * m.norm().max(1.0));
        if es.is_simple() {
            for (i, p) in es.pairs.iter().enumerate() {
                for (j, q) in es.pairs.iter().enumerate() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((p.left.dot(&q.right) - want).norm() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn polynomial_roots_round_trip(roots in proptest::collection::vec(complex(2.0), 1..6)) {
        let sep = roots.iter().enumerate().all(|(i, a)| roots[..i].iter().all(|b| (a - b).norm() > 0.1));
        prop_assume!(sep);
        let p = workbench_core::Polynomial::from_roots(&roots);
        let found = poly_roots(&p).unwrap();
        prop_assert_eq!(found.len(), roots.len());
        for r in &roots {
            let best = found.iter().map(|f| (f - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-9);
        }
    }

    #[test]
    fn symmetrizer_is_idempotent(m in 1usize..=4) {
        let p = sym_projector(m).unwrap();
        prop_assert!(rel_diff(&p.matmul(&p), &p) < 1e-13);
        let v = symmetric_isometry(m);
        prop_assert!(rel_diff(&v.adjoint().matmul(&v), &CMatrix::identity(m + 1)) < 1e-13);
        prop_assert!(rel_diff(&v.matmul(&v.adjoint()), &p) < 1e-13);
    }

    #[test]
    fn spin_projectors_resolve_identity(s in spin()) {
        let d = s.dim();
        let mut sum = CMatrix::zeros(d * d, d * d);
        for l in 0..=s.twice() {
            sum = &sum + &projector_spin_l(l, s).unwrap();
        }
        prop_assert!(rel_diff(&sum, &CMatrix::identity(d * d)) < 1e-12);
    }

    #[test]
    fn yang_baxter_holds(s1 in spin(), s2 in spin(), u in complex(1.5), v in complex(1.5)) {
        prop_assume!((s1.dim() * s2.dim()) <= 12);
        let r = ybe_residual(s1, SpinLabel::HALF, s2, u, v, cr(1.0)).unwrap();
        prop_assert!(r < 1e-10, "{}", r);
    }

    #[test]
    fn reflection_equation_holds(s in spin(), u in complex(1.0), v in complex(1.0), p in complex(1.0), vs in complex(1.0)) {
        let r = reflection_residual(SpinLabel::HALF, s, u, v, p, vs, cr(1.0)).unwrap();
        prop_assert!(r < 1e-10, "{}", r);
    }

    #[test]
    fn gauge_matrix_inverts(xi in away_from_zero(2.0, 0.05)) {
        prop_assume!((xi * xi + 1.0).norm() > 1e-2);
        let g = GaugeData::new(xi).unwrap();
        prop_assert!(rel_diff(&g.u0.matmul(&g.u0_inv), &CMatrix::identity(2)) < 1e-11);
    }

    #[test]
    fn q_is_crossing_symmetric(roots in proptest::collection::vec(complex(1.5), 0..5), u in complex(2.0), eta in away_from_zero(1.5, 0.2)) {
        let q = QPolynomial::from_roots(&roots, eta);
        let (a, b) = (q.eval(u), q.eval(-u - eta));
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn sov_labels_are_a_bijection(tw in 1u32..=3, n in 1usize..=3) {
        let all = SovIndex::all(tw, n);
        prop_assert_eq!(all.len(), ((tw + 1) as usize).pow(n as u32));
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), all.len());
        for idx in &all {
            prop_assert_eq!(&idx.reflected(tw).reflected(tw), idx);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn transfer_matrices_commute(t1 in -0.4f64..0.4, t2 in -0.4f64..0.4, u in complex(1.0), v in complex(1.0)) {
        prop_assume!((t1 - t2).abs() > 0.05 && (t1 + t2).abs() > 0.05);
        let params = ModelParams::new(
            SpinLabel::from_twice(2).unwrap(),
            cr(1.0),
            BoundaryParams::new(cr(0.8), cr(0.0), cr(1.2), cr(0.6)),
            vec![cr(t1), cr(t2)],
        ).unwrap();
        let chain = Chain::new(params).unwrap();
        prop_assert!(chain.commutativity_residual(u, v).unwrap() < 1e-10);
        prop_assert!(chain.crossing_residual(u).unwrap() < 1e-10);
    }
}
