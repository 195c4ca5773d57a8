use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use nvsensor_bench::{constants_ratio_100, sensor};
use nvsensor_core::estimation::{run_estimation, EstimationRun};
use nvsensor_core::hamiltonian::validate_reduction;
use nvsensor_core::protocol::{run_hybrid_exact, run_hybrid_trajectories};

fn exact_channel(c: &mut Criterion) {
    let mut group = c.benchmark_group("hybrid_exact");
    for n in [1u32, 16, 256] {
        let params = sensor(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &params, |b, p| {
            b.iter(|| run_hybrid_exact(black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn trajectories(c: &mut Criterion) {
    let shots = 2_000u64;
    let mut group = c.benchmark_group("hybrid_trajectories");
    group.throughput(Throughput::Elements(shots));
    for n in [1u32, 16] {
        let params = sensor(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &params, |b, p| {
            b.iter(|| run_hybrid_trajectories(black_box(p), shots, 7).unwrap())
        });
    }
    group.finish();
}

fn estimation(c: &mut Criterion) {
    let params = sensor(16);
    c.bench_function("estimation_1000_reps", |b| {
        b.iter(|| run_estimation(EstimationRun::new(black_box(params), 1000, 1)).unwrap())
    });
}

fn reduction(c: &mut Criterion) {
    let constants = constants_ratio_100();
    let t_max = 10.0 / constants.a.abs();
    let mut group = c.benchmark_group("validate_reduction");
    group.sample_size(20);
    group.bench_function("400_steps", |b| {
        b.iter(|| validate_reduction(black_box(&constants), t_max, 400).unwrap())
    });
    group.finish();
}

criterion_group!(benches, exact_channel, trajectories, estimation, reduction);
criterion_main!(benches);
