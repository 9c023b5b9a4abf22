//! Shared input generation for the pipeline benchmarks.

use mwsp_core::features::SparseRow;
use mwsp_core::fixtures;
use mwsp_core::GraphDataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic dataset of small random labeled graphs.
pub fn bench_dataset(graphs: usize, max_nodes: usize) -> GraphDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    fixtures::random_dataset(&mut rng, graphs, max_nodes)
}

/// Dense random transport costs.
pub fn bench_costs(m: usize, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    (0..m * n).map(|_| rng.gen_range(0.0..20.0)).collect()
}

/// Random sparse integer feature rows over one column space.
pub fn bench_rows(count: usize, width: usize) -> Vec<SparseRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..count)
        .map(|_| {
            let mut entries = Vec::new();
            for c in 0..width {
                if rng.gen_bool(0.3) {
                    entries.push((c, rng.gen_range(1..6)));
                }
            }
            SparseRow::new(width, entries)
        })
        .collect()
}

/// Random symmetric matrix for the eigensolver benchmarks.
pub fn bench_symmetric(n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut a = vec![0.0f64; n * n];
    for i in 0..n {
        for j in i..n {
            let x = rng.gen_range(-1.0..1.0);
            a[i * n + j] = x;
            a[j * n + i] = x;
        }
    }
    a
}
