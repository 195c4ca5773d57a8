use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nvsensor_core::optimizer::{
    breakeven_epsilon, default_epsilon_grid, figure3_sweep, optimize_r, DEFAULT_N_MAX,
};

fn single_point(c: &mut Criterion) {
    let mut group = c.benchmark_group("optimize_r");
    // 5e-5 puts the optimum in the golden-section tail
    for eps in [0.05, 1e-3, 5e-5] {
        group.bench_with_input(BenchmarkId::from_parameter(eps), &eps, |b, &e| {
            b.iter(|| optimize_r(black_box(e), DEFAULT_N_MAX).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let grid = default_epsilon_grid();
    c.bench_function("figure3_sweep_61", |b| {
        b.iter(|| figure3_sweep(black_box(&grid), DEFAULT_N_MAX).unwrap())
    });
    c.bench_function("breakeven_epsilon", |b| {
        b.iter(|| breakeven_epsilon(black_box(DEFAULT_N_MAX)).unwrap())
    });
}

criterion_group!(benches, single_point, sweep);
criterion_main!(benches);
