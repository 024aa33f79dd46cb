//! Sequential (one-thread pool) against the default rayon pool for the two
//! data-parallel hot loops. Build with `--no-default-features` to measure
//! the plain sequential fallback instead.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qnn_witness::fixtures::{table2, table3};
use qnn_witness::shots::sweep_state;
use qnn_witness::trainer::gradient;
use qnn_witness::{build_training_set, make_pair_state, propagate, Method, PairStateKind, QuantumState, ShotConfig, TrainerConfig};
use rayon::ThreadPoolBuilder;
use std::hint::black_box;

fn pools() -> Vec<(String, rayon::ThreadPool)> {
    let threads = rayon::current_num_threads();
    let mut out = vec![("1-thread".to_string(), ThreadPoolBuilder::new().num_threads(1).build().unwrap())];
    if threads > 1 {
        out.push((format!("{threads}-threads"), ThreadPoolBuilder::new().num_threads(threads).build().unwrap()));
    }
    out
}

fn bench_sweep(c: &mut Criterion) {
    let psi: QuantumState = make_pair_state(PairStateKind::P, (0, 1), 2).unwrap().into();
    let QuantumState::Pure(fin) = propagate(&psi, &table2(), Method::Gates).unwrap() else {
        unreachable!()
    };
    let config = ShotConfig { shot_counts: (50..=2000).step_by(50).collect(), iterations: 20, ..ShotConfig::default() };
    let mut group = c.benchmark_group("shot_sweep");
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(&label), |b| {
            b.iter(|| pool.install(|| sweep_state(black_box(&fin), (0, 1), &config).unwrap()))
        });
    }
    group.finish();
}

fn bench_gradient(c: &mut Criterion) {
    let schedule = table3().resized(5).unwrap();
    let set = build_training_set(5).unwrap();
    let config = TrainerConfig::default();
    let mut group = c.benchmark_group("gradient_n5");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(BenchmarkId::from_parameter(&label), |b| {
            b.iter(|| pool.install(|| gradient(black_box(&schedule), &set, &config).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_sweep, bench_gradient);
criterion_main!(benches);
