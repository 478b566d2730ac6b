use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use peano_core::elimination::{derive_geometric, derive_many, replay_derivation_with};
use peano_core::numeric::{estimate_limit_with, Polynomial, SweepMode, SweepParams, TestFunction};
use peano_core::rational::q;
use peano_core::stencil::mz_difference;
use peano_core::Execution;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    let s = mz_difference(8).unwrap().stencil;
    let poly = TestFunction::Poly(Polynomial::new(vec![1, -3, 0, 2, 0, 0, 1, 0, 0, 5]));
    let exact = SweepParams { mode: SweepMode::Exact, count: 60, ..SweepParams::default() };
    let float = SweepParams { mode: SweepMode::Float, count: 60, ..SweepParams::default() };
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("exact_poly9_mz8", name), &exec, |b, &exec| {
            b.iter(|| estimate_limit_with("mz(8)", &s, &poly, &q(1, 3), black_box(&exact), exec).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("float_x3sin_mz8", name), &exec, |b, &exec| {
            b.iter(|| estimate_limit_with("mz(8)", &s, &TestFunction::X3Sin, &q(0, 1), black_box(&float), exec).unwrap())
        });
    }
    group.finish();
}

fn replay(c: &mut Criterion) {
    let mut group = c.benchmark_group("replay");
    group.sample_size(10);
    let n = 16;
    let d = derive_geometric(n).unwrap().derivation;
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("n16", name), &exec, |b, &exec| {
            b.iter(|| replay_derivation_with(n, black_box(&d), exec).unwrap())
        });
    }
    group.finish();
}

fn derivations(c: &mut Criterion) {
    let mut group = c.benchmark_group("derive_many");
    let orders: Vec<usize> = (2..=60).collect();
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new("2..=60", name), &exec, |b, &exec| {
            b.iter(|| derive_many(black_box(&orders), exec))
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps, replay, derivations);
criterion_main!(benches);
