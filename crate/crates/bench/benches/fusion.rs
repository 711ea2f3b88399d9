use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use workbench_core::boundary::k_minus_fused;
use workbench_core::rmatrix::{r_j_s_fused, r_s_s_direct};
use workbench_core::{c64, SpinLabel};

fn fusion(c: &mut Criterion) {
    let u = c64::new(0.37, 0.21);
    let eta = c64::new(1.0, 0.0);
    let mut g = c.benchmark_group("fusion");
    for tw in 1..=3 {
        let s = SpinLabel::from_twice(tw).unwrap();
        g.bench_with_input(BenchmarkId::new("r_s_s_fused", s), &s, |b, &s| {
            b.iter(|| r_j_s_fused(black_box(u), s, s, eta).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("r_s_s_direct", s), &s, |b, &s| {
            b.iter(|| r_s_s_direct(black_box(u), s, eta).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("k_minus_fused", s), &s, |b, &s| {
            b.iter(|| k_minus_fused(black_box(u), s, c64::new(0.8, 0.0), c64::new(0.3, 0.0), eta).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, fusion);
criterion_main!(benches);
