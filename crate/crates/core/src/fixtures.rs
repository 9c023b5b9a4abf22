//! Small hand-checked graphs and generators shared by the test suites and
//! the `oracle` verification command.

use rand::Rng;

use crate::graph::{Graph, GraphDataset};
use crate::paths::BfsTree;

/// The two six-node worked-example graphs used throughout the verification
/// suite. Both share the label alphabet {1, 2, 3, 4}.
///
/// First graph: edges a-b, a-c, a-e, d-c, g-e with labels
/// a=4, b=1, c=3, d=2, e=3, g=1 (nodes indexed in that order).
/// Second graph: edges a-b, a-c, a-e, a-d, d-c, g-b, same label assignment.
pub fn example_pair_graphs() -> (Graph, Graph) {
    let g1 = Graph::from_edges(
        6,
        &[(0, 1), (0, 2), (0, 4), (3, 2), (5, 4)],
        Some(vec![4, 1, 3, 2, 3, 1]),
    )
    .unwrap();
    let g2 = Graph::from_edges(
        6,
        &[(0, 1), (0, 2), (0, 4), (0, 3), (3, 2), (5, 1)],
        Some(vec![4, 1, 3, 2, 3, 1]),
    )
    .unwrap();
    (g1, g2)
}

/// The worked-example pair as a two-graph dataset with classes 0/1.
pub fn example_pair_dataset() -> GraphDataset {
    let (g1, g2) = example_pair_graphs();
    GraphDataset::new("example-pair", vec![g1, g2], vec![0, 1]).unwrap()
}

/// Path graph on `n` nodes with uniform labels.
pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    Graph::from_edges(n, &edges, Some(vec![1; n])).unwrap()
}

/// Cycle graph on `n >= 3` nodes with uniform labels.
pub fn cycle_graph(n: usize) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
    edges.push((n - 1, 0));
    Graph::from_edges(n, &edges, Some(vec![1; n])).unwrap()
}

/// Uniform random rooted labeled tree on `n` nodes (root 0): each node i > 0
/// attaches to a uniformly chosen earlier node; labels drawn from
/// 1..=label_alphabet.
pub fn random_labeled_tree<R: Rng>(rng: &mut R, n: usize, label_alphabet: u32) -> Graph {
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    let labels = (0..n).map(|_| rng.gen_range(1..=label_alphabet)).collect();
    Graph::from_edges(n, &edges, Some(labels)).unwrap()
}

/// Erdos-Renyi style random labeled graph; guaranteed at least one node.
pub fn random_labeled_graph<R: Rng>(
    rng: &mut R,
    n: usize,
    edge_prob: f64,
    label_alphabet: u32,
) -> Graph {
    let n = n.max(1);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(edge_prob) {
                edges.push((u, v));
            }
        }
    }
    let labels = (0..n).map(|_| rng.gen_range(1..=label_alphabet)).collect();
    Graph::from_edges(n, &edges, Some(labels)).unwrap()
}

/// Brute-force rooted labeled tree isomorphism: equal root labels and a
/// backtracking perfect matching between child subtrees. Exponential in
/// principle, fine for the small trees the verification suite samples;
/// deliberately shares nothing with the canonical string encoding it
/// cross-checks.
pub fn rooted_isomorphic(a: &BfsTree, labels_a: &[u32], b: &BfsTree, labels_b: &[u32]) -> bool {
    fn subtree_iso(
        a: &BfsTree,
        labels_a: &[u32],
        children_a: &[Vec<usize>],
        pos_a: usize,
        b: &BfsTree,
        labels_b: &[u32],
        children_b: &[Vec<usize>],
        pos_b: usize,
    ) -> bool {
        if labels_a[a.members()[pos_a]] != labels_b[b.members()[pos_b]] {
            return false;
        }
        let ca = &children_a[pos_a];
        let cb = &children_b[pos_b];
        if ca.len() != cb.len() {
            return false;
        }
        fn matching(
            a: &BfsTree,
            labels_a: &[u32],
            children_a: &[Vec<usize>],
            ca: &[usize],
            b: &BfsTree,
            labels_b: &[u32],
            children_b: &[Vec<usize>],
            cb: &[usize],
            used: &mut [bool],
            next: usize,
        ) -> bool {
            if next == ca.len() {
                return true;
            }
            for (slot, &child_b) in cb.iter().enumerate() {
                if used[slot] {
                    continue;
                }
                if subtree_iso(
                    a, labels_a, children_a, ca[next], b, labels_b, children_b, child_b,
                ) {
                    used[slot] = true;
                    if matching(
                        a, labels_a, children_a, ca, b, labels_b, children_b, cb, used,
                        next + 1,
                    ) {
                        return true;
                    }
                    used[slot] = false;
                }
            }
            false
        }
        let mut used = vec![false; cb.len()];
        matching(
            a, labels_a, children_a, ca, b, labels_b, children_b, cb, &mut used, 0,
        )
    }
    let children_a = a.children_positions();
    let children_b = b.children_positions();
    subtree_iso(a, labels_a, &children_a, 0, b, labels_b, &children_b, 0)
}

/// Random dataset of small labeled graphs with two balanced classes.
pub fn random_dataset<R: Rng>(rng: &mut R, graphs: usize, max_nodes: usize) -> GraphDataset {
    let mut gs = Vec::with_capacity(graphs);
    let mut classes = Vec::with_capacity(graphs);
    for i in 0..graphs {
        let n = rng.gen_range(2..=max_nodes.max(2));
        gs.push(random_labeled_graph(rng, n, 0.4, 4));
        classes.push((i % 2) as i64);
    }
    GraphDataset::new("random", gs, classes).unwrap()
}
