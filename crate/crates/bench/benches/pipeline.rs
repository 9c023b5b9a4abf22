use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use mwsp_bench::{bench_costs, bench_dataset, bench_rows, bench_symmetric};
use mwsp_core::kernels::{build_gram, KernelConfig, KernelVariant};
use mwsp_core::paths::all_shortest_paths;
use mwsp_core::svm::spectrum_clip;
use mwsp_core::wasserstein::{solve_w1, solve_w1_from_costs};
use mwsp_core::{features, labeling};

fn transport(c: &mut Criterion) {
    let costs = bench_costs(20, 20);
    c.bench_function("w1 network simplex 20x20", |b| {
        b.iter(|| solve_w1_from_costs(black_box(&costs), 20, 20).unwrap())
    });
    let xs = bench_rows(18, 300);
    let ys = bench_rows(18, 300);
    c.bench_function("w1 sparse rows 18x18", |b| {
        b.iter(|| solve_w1(black_box(&xs), black_box(&ys)).unwrap())
    });
}

fn feature_extraction(c: &mut Criterion) {
    let ds = bench_dataset(20, 16);
    c.bench_function("paths d=3", |b| {
        b.iter(|| all_shortest_paths(black_box(&ds), 3))
    });
    c.bench_function("augment k=2", |b| {
        b.iter(|| labeling::augment_labels(black_box(&ds), 2))
    });
    c.bench_function("feature matrices d=2 k=1", |b| {
        b.iter(|| features::build_feature_matrices(black_box(&ds), 2, 1).unwrap())
    });
}

fn gram(c: &mut Criterion) {
    let ds = bench_dataset(16, 12);
    let config = KernelConfig::new(KernelVariant::Mwsp, 2, 1, 0.1).unwrap();
    c.bench_function("gram 16 graphs d=2 k=1", |b| {
        b.iter(|| build_gram(black_box(&ds), config).unwrap())
    });
}

fn eigensolver(c: &mut Criterion) {
    let a = bench_symmetric(80);
    c.bench_function("spectrum clip 80x80", |b| {
        b.iter(|| spectrum_clip(black_box(&a), 80).unwrap())
    });
}

criterion_group!(benches, transport, feature_extraction, gram, eigensolver);
criterion_main!(benches);
