use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use workbench_bench::{config_a, config_b, config_c};
use workbench_core::{c64, Chain};

fn transfer(c: &mut Criterion) {
    let u = c64::new(0.37, 0.21);
    let mut g = c.benchmark_group("transfer_half");
    for (name, p) in [("A", config_a()), ("B", config_b()), ("C", config_c())] {
        let chain = Chain::new(p).unwrap();
        g.bench_function(name, |b| b.iter(|| chain.transfer_half(black_box(u)).unwrap()));
    }
    g.finish();
    let chain = Chain::new(config_b()).unwrap();
    c.bench_function("transfer_spin_s/B", |b| {
        b.iter(|| chain.transfer(chain.spin(), black_box(u)).unwrap())
    });
}

criterion_group!(benches, transfer);
criterion_main!(benches);
