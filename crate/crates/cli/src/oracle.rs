//! Self-check suite: cross-validates the transport solver against an
//! independent flow solver, the feature-map sum identity against exact
//! integer recomputation, and the canonical tree encoding against
//! brute-force rooted isomorphism, all on seeded synthetic inputs.

use clap::Args;
use mwsp_core::features::{self, SparseRow};
use mwsp_core::labeling::canonical_tree_string;
use mwsp_core::paths::{all_shortest_paths, truncated_bfs_tree};
use mwsp_core::wasserstein::{self, oracle as w1_oracle};
use mwsp_core::{fixtures, labeling, Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Random transport instances to cross-check
    #[arg(long, default_value_t = 200)]
    pub transport_samples: usize,

    /// Random trees for the canonical-encoding check
    #[arg(long, default_value_t = 500)]
    pub tree_samples: usize,
}

struct Suite {
    failures: usize,
}

impl Suite {
    fn check(&mut self, name: &str, passed: bool, detail: &str) {
        if passed {
            println!("[PASS] {name}");
        } else {
            println!("[FAIL] {name}: {detail}");
            self.failures += 1;
        }
    }
}

pub fn run(args: OracleArgs) -> Result<()> {
    let mut suite = Suite { failures: 0 };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    transport_checks(&mut suite, &mut rng, args.transport_samples)?;
    feature_sum_checks(&mut suite, &mut rng)?;
    canonical_encoding_checks(&mut suite, &mut rng, args.tree_samples)?;
    worked_example_checks(&mut suite)?;

    if suite.failures > 0 {
        Err(Error::Internal(format!(
            "{} oracle check(s) failed",
            suite.failures
        )))
    } else {
        println!("all oracle checks passed");
        Ok(())
    }
}

fn transport_checks(suite: &mut Suite, rng: &mut ChaCha8Rng, samples: usize) -> Result<()> {
    let mut worst_gap = 0.0f64;
    let mut worst_residual = 0.0f64;
    for _ in 0..samples {
        let m = rng.gen_range(1..=8);
        let n = rng.gen_range(1..=8);
        let cost: Vec<f64> = (0..m * n).map(|_| rng.gen_range(0..60) as f64).collect();
        let (w1, plan) = wasserstein::solve_w1_from_costs(&cost, m, n)?;
        let reference = w1_oracle::w1_bruteforce_from_costs(&cost, m, n)?;
        worst_gap = worst_gap.max((w1 - reference).abs());
        worst_residual = worst_residual.max(plan.max_marginal_residual());
    }
    suite.check(
        &format!("transport solver matches the flow oracle on {samples} instances"),
        worst_gap <= 1e-9,
        &format!("worst gap {worst_gap:.3e}"),
    );
    suite.check(
        "transport plans satisfy their marginals",
        worst_residual <= wasserstein::FEASIBILITY_TOL,
        &format!("worst residual {worst_residual:.3e}"),
    );
    let oversized = w1_oracle::w1_bruteforce_from_costs(&vec![0.0; 81], 9, 9);
    suite.check(
        "flow oracle refuses instances over its size cap",
        matches!(oversized, Err(Error::Precondition(_))),
        "9x9 was not refused",
    );
    Ok(())
}

fn feature_sum_checks(suite: &mut Suite, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut ok = true;
    let mut detail = String::new();
    for trial in 0..5 {
        let ds = fixtures::random_dataset(rng, 6, 9);
        let (d, k) = ([1, 2, 3][trial % 3], [0, 1, 2][trial % 3]);
        let matrices = features::build_feature_matrices(&ds, d, k)?;
        for matrix in &matrices {
            let vector = features::graph_feature_map(matrix);
            let mut expected = SparseRow::new(matrix.width(), Vec::new());
            for row in matrix.rows() {
                expected.add_assign(row);
            }
            if vector.vector() != &expected {
                ok = false;
                detail = format!("graph {} at d={d} k={k}", matrix.graph());
            }
        }
    }
    suite.check(
        "graph feature vectors equal exact node-row sums",
        ok,
        &detail,
    );
    Ok(())
}

fn canonical_encoding_checks(
    suite: &mut Suite,
    rng: &mut ChaCha8Rng,
    samples: usize,
) -> Result<()> {
    let mut trees = Vec::with_capacity(samples);
    for _ in 0..samples {
        let n = rng.gen_range(1..=8);
        let graph = fixtures::random_labeled_tree(rng, n, 3);
        let tree = truncated_bfs_tree(&graph, 0, n)?;
        let canon = canonical_tree_string(&tree, graph.labels().unwrap());
        trees.push((graph, tree, canon));
    }
    let mut mismatch = None;
    'outer: for i in 0..trees.len() {
        for j in (i + 1)..trees.len() {
            let same_string = trees[i].2 == trees[j].2;
            let iso = fixtures::rooted_isomorphic(
                &trees[i].1,
                trees[i].0.labels().unwrap(),
                &trees[j].1,
                trees[j].0.labels().unwrap(),
            );
            if same_string != iso {
                mismatch = Some((i, j, same_string, iso));
                break 'outer;
            }
        }
    }
    suite.check(
        &format!("canonical strings match rooted isomorphism on {samples} trees"),
        mismatch.is_none(),
        &format!("{mismatch:?}"),
    );
    Ok(())
}

fn worked_example_checks(suite: &mut Suite) -> Result<()> {
    let ds = fixtures::example_pair_dataset();
    let paths = all_shortest_paths(&ds, 1);
    let labeled: Vec<String> = paths
        .graph(0)
        .root_paths(0)
        .iter()
        .map(|p| {
            p.iter()
                .map(|&v| ds.graph(0).label(v).to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect();
    suite.check(
        "worked-example depth-1 paths",
        labeled == ["4", "4,1", "4,3", "4,3"],
        &format!("{labeled:?}"),
    );
    let dict = labeling::build_scale_dictionary(&ds, 2);
    suite.check(
        "worked-example depth-2 dictionary has 11 entries",
        dict.len() == 11,
        &format!("{} entries", dict.len()),
    );
    Ok(())
}
