//! Sparse shortest-path feature maps.
//!
//! For each scale the label sequences of all root paths form a sorted
//! vocabulary; a node's feature row counts how often each vocabulary entry
//! occurs among the paths rooted at it, and a graph's feature vector is the
//! column-wise sum of its node rows. Multi-scale rows concatenate the
//! per-scale blocks in scale order.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::GraphDataset;
use crate::labeling::{self, ScaleLabeling};
use crate::paths::{self, RootPathSet};

/// A sparse row of non-negative integer counts over a fixed-width column
/// space. Entries are sorted by column and strictly positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseRow {
    width: usize,
    entries: Vec<(usize, u64)>,
}

impl SparseRow {
    pub fn new(width: usize, mut entries: Vec<(usize, u64)>) -> Self {
        entries.retain(|&(_, c)| c > 0);
        entries.sort_unstable_by_key(|&(col, _)| col);
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|&(col, _)| col < width));
        SparseRow { width, entries }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn entries(&self) -> &[(usize, u64)] {
        &self.entries
    }

    pub fn count_at(&self, col: usize) -> u64 {
        self.entries
            .binary_search_by_key(&col, |&(c, _)| c)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u64 {
        self.entries.iter().map(|&(_, c)| c).sum()
    }

    /// Euclidean distance to another row of the same width.
    pub fn euclidean_distance(&self, other: &SparseRow) -> f64 {
        let mut sum = 0.0f64;
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (ca, va) = self.entries[i];
            let (cb, vb) = other.entries[j];
            let diff = match ca.cmp(&cb) {
                std::cmp::Ordering::Less => {
                    i += 1;
                    va as f64
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    vb as f64
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    va as f64 - vb as f64
                }
            };
            sum += diff * diff;
        }
        for &(_, v) in &self.entries[i..] {
            sum += (v as f64) * (v as f64);
        }
        for &(_, v) in &other.entries[j..] {
            sum += (v as f64) * (v as f64);
        }
        sum.sqrt()
    }

    /// Adds another row of the same width into this one.
    pub fn add_assign(&mut self, other: &SparseRow) {
        let mut merged = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() && j < other.entries.len() {
            let (ca, va) = self.entries[i];
            let (cb, vb) = other.entries[j];
            match ca.cmp(&cb) {
                std::cmp::Ordering::Less => {
                    merged.push((ca, va));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    merged.push((cb, vb));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    merged.push((ca, va + vb));
                    i += 1;
                    j += 1;
                }
            }
        }
        merged.extend_from_slice(&self.entries[i..]);
        merged.extend_from_slice(&other.entries[j..]);
        self.entries = merged;
    }
}

/// The sorted set of unique path representations at one scale, with each
/// representation's column position.
#[derive(Debug, Clone)]
pub struct PathVocabulary {
    scale: usize,
    entries: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
}

impl PathVocabulary {
    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Vec<u32>] {
        &self.entries
    }

    pub fn column_of(&self, representation: &[u32]) -> Option<usize> {
        self.index.get(representation).copied()
    }
}

/// Replaces each node index of `path` by its scale label.
pub fn path_representation(path: &[usize], labeling: &ScaleLabeling, graph: usize) -> Vec<u32> {
    path.iter().map(|&v| labeling.label(graph, v)).collect()
}

/// Collects the union of all path representations across the dataset at the
/// labeling's scale, sorted by element-wise numeric order.
pub fn build_vocabulary(paths: &RootPathSet, labeling: &ScaleLabeling) -> PathVocabulary {
    let mut per_graph: Vec<Vec<Vec<u32>>> = (0..paths.graph_count())
        .into_par_iter()
        .map(|g| {
            let mut reps: Vec<Vec<u32>> = paths
                .graph(g)
                .iter()
                .flat_map(|root_paths| {
                    root_paths
                        .iter()
                        .map(|path| path_representation(path, labeling, g))
                })
                .collect();
            reps.sort_unstable();
            reps.dedup();
            reps
        })
        .collect();
    let mut entries: Vec<Vec<u32>> = per_graph.drain(..).flatten().collect();
    entries.sort_unstable();
    entries.dedup();
    let index = entries
        .iter()
        .enumerate()
        .map(|(i, r)| (r.clone(), i))
        .collect();
    PathVocabulary {
        scale: labeling.scale(),
        entries,
        index,
    }
}

/// Counts each vocabulary entry among one node's paths. Every
/// representation must be covered by the vocabulary; a miss means the
/// vocabulary and paths were built from different data.
pub fn node_feature_map(
    node_paths: &[Vec<usize>],
    labeling: &ScaleLabeling,
    graph: usize,
    vocabulary: &PathVocabulary,
) -> Result<SparseRow> {
    let mut counts: HashMap<usize, u64> = HashMap::new();
    for path in node_paths {
        let rep = path_representation(path, labeling, graph);
        let col = vocabulary.column_of(&rep).ok_or_else(|| {
            Error::Internal(format!(
                "path representation {rep:?} missing from scale-{} vocabulary",
                vocabulary.scale()
            ))
        })?;
        *counts.entry(col).or_insert(0) += 1;
    }
    Ok(SparseRow::new(vocabulary.len(), counts.into_iter().collect()))
}

/// One graph's node rows over the concatenated multi-scale column space.
#[derive(Debug, Clone)]
pub struct NodeFeatureMatrix {
    graph: usize,
    rows: Vec<SparseRow>,
    width: usize,
}

impl NodeFeatureMatrix {
    pub fn new(graph: usize, width: usize, rows: Vec<SparseRow>) -> Self {
        debug_assert!(rows.iter().all(|r| r.width() == width));
        NodeFeatureMatrix { graph, rows, width }
    }

    pub fn graph(&self) -> usize {
        self.graph
    }

    pub fn rows(&self) -> &[SparseRow] {
        &self.rows
    }

    pub fn node_count(&self) -> usize {
        self.rows.len()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    /// `column:count` pairs per node, one node per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (v, row) in self.rows.iter().enumerate() {
            let pairs: Vec<String> = row
                .entries()
                .iter()
                .map(|&(c, n)| format!("{c}:{n}"))
                .collect();
            out.push_str(&format!("{} {} {}\n", self.graph, v, pairs.join(" ")));
        }
        out
    }
}

/// A graph-level count vector: the column-wise sum of the node rows.
#[derive(Debug, Clone)]
pub struct GraphFeatureVector {
    graph: usize,
    vector: SparseRow,
}

impl GraphFeatureVector {
    pub fn graph(&self) -> usize {
        self.graph
    }

    pub fn vector(&self) -> &SparseRow {
        &self.vector
    }
}

/// Sums the rows of a node feature matrix in exact integer arithmetic.
pub fn graph_feature_map(matrix: &NodeFeatureMatrix) -> GraphFeatureVector {
    let mut vector = SparseRow::new(matrix.width(), Vec::new());
    for row in matrix.rows() {
        vector.add_assign(row);
    }
    GraphFeatureVector {
        graph: matrix.graph(),
        vector,
    }
}

/// Concatenates one row per scale (ascending scale order) into a single row
/// over the combined column space.
pub fn multiscale_concat(per_scale_rows: &[SparseRow]) -> Result<SparseRow> {
    if per_scale_rows.is_empty() {
        return Err(Error::Arity("no per-scale rows to concatenate".into()));
    }
    let width = per_scale_rows.iter().map(SparseRow::width).sum();
    let mut entries = Vec::new();
    let mut offset = 0usize;
    for row in per_scale_rows {
        entries.extend(row.entries().iter().map(|&(c, n)| (c + offset, n)));
        offset += row.width();
    }
    Ok(SparseRow::new(width, entries))
}

/// Multi-scale node feature matrices for a whole dataset: paths extracted
/// once at depth `d`, relabeled per scale 0..=k, counted against per-scale
/// vocabularies, and concatenated.
pub fn build_feature_matrices(
    dataset: &GraphDataset,
    d: usize,
    k: usize,
) -> Result<Vec<NodeFeatureMatrix>> {
    if !dataset.is_labeled() {
        return Err(Error::Precondition(
            "dataset has no node labels; assign surrogate labels first".into(),
        ));
    }
    let paths = paths::all_shortest_paths(dataset, d);
    let labelings = labeling::augment_labels(dataset, k);
    let vocabularies: Vec<PathVocabulary> = labelings
        .iter()
        .map(|labeling| build_vocabulary(&paths, labeling))
        .collect();

    (0..dataset.len())
        .into_par_iter()
        .map(|g| {
            let node_count = dataset.graph(g).node_count();
            let rows = (0..node_count)
                .map(|v| {
                    let per_scale: Vec<SparseRow> = labelings
                        .iter()
                        .zip(&vocabularies)
                        .map(|(labeling, vocabulary)| {
                            node_feature_map(
                                paths.graph(g).root_paths(v),
                                labeling,
                                g,
                                vocabulary,
                            )
                        })
                        .collect::<Result<_>>()?;
                    multiscale_concat(&per_scale)
                })
                .collect::<Result<Vec<_>>>()?;
            let width = rows.first().map_or(0, SparseRow::width);
            Ok(NodeFeatureMatrix {
                graph: g,
                rows,
                width,
            })
        })
        .collect()
}

/// Multi-scale graph feature vectors (the summed form of
/// [`build_feature_matrices`]).
pub fn build_graph_vectors(
    dataset: &GraphDataset,
    d: usize,
    k: usize,
) -> Result<Vec<GraphFeatureVector>> {
    Ok(build_feature_matrices(dataset, d, k)?
        .iter()
        .map(graph_feature_map)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::labeling::augment_labels;
    use crate::paths::all_shortest_paths;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rep_of(vocab: &PathVocabulary, rep: &[u32]) -> usize {
        vocab.column_of(rep).expect("representation in vocabulary")
    }

    #[test]
    fn scale_zero_vocabulary_of_example_pair_at_depth_one() {
        let ds = fixtures::example_pair_dataset();
        let paths = all_shortest_paths(&ds, 1);
        let labelings = augment_labels(&ds, 0);
        let vocab = build_vocabulary(&paths, &labelings[0]);
        // hand enumeration over both graphs; the 1,1 entry comes from the
        // second graph's adjacent pair of label-1 nodes
        let expected: Vec<Vec<u32>> = vec![
            vec![1],
            vec![1, 1],
            vec![1, 3],
            vec![1, 4],
            vec![2],
            vec![2, 3],
            vec![2, 4],
            vec![3],
            vec![3, 1],
            vec![3, 2],
            vec![3, 4],
            vec![4],
            vec![4, 1],
            vec![4, 2],
            vec![4, 3],
        ];
        assert_eq!(vocab.entries(), expected.as_slice());
    }

    #[test]
    fn depth_zero_vocabulary_is_the_label_set() {
        let ds = fixtures::example_pair_dataset();
        let paths = all_shortest_paths(&ds, 0);
        let labelings = augment_labels(&ds, 0);
        let vocab = build_vocabulary(&paths, &labelings[0]);
        let expected: Vec<Vec<u32>> = vec![vec![1], vec![2], vec![3], vec![4]];
        assert_eq!(vocab.entries(), expected.as_slice());
    }

    #[test]
    fn node_map_of_example_root() {
        let ds = fixtures::example_pair_dataset();
        let paths = all_shortest_paths(&ds, 1);
        let labelings = augment_labels(&ds, 0);
        let vocab = build_vocabulary(&paths, &labelings[0]);
        let row = node_feature_map(paths.graph(0).root_paths(0), &labelings[0], 0, &vocab).unwrap();
        assert_eq!(row.count_at(rep_of(&vocab, &[4])), 1);
        assert_eq!(row.count_at(rep_of(&vocab, &[4, 1])), 1);
        assert_eq!(row.count_at(rep_of(&vocab, &[4, 3])), 2);
        assert_eq!(row.total(), 4);
    }

    #[test]
    fn node_map_of_leaf_neighbor() {
        // node b of the first example graph sees only itself and its
        // neighbor a at depth 1
        let ds = fixtures::example_pair_dataset();
        let paths = all_shortest_paths(&ds, 1);
        let labelings = augment_labels(&ds, 0);
        let vocab = build_vocabulary(&paths, &labelings[0]);
        let row = node_feature_map(paths.graph(0).root_paths(1), &labelings[0], 0, &vocab).unwrap();
        assert_eq!(row.count_at(rep_of(&vocab, &[1])), 1);
        assert_eq!(row.count_at(rep_of(&vocab, &[1, 4])), 1);
        assert_eq!(row.total(), 2);
    }

    #[test]
    fn isolated_node_map_is_a_single_count() {
        let g = crate::graph::Graph::from_edges(1, &[], Some(vec![5])).unwrap();
        let ds = crate::graph::GraphDataset::new("one", vec![g], vec![0]).unwrap();
        let paths = all_shortest_paths(&ds, 3);
        let labelings = augment_labels(&ds, 0);
        let vocab = build_vocabulary(&paths, &labelings[0]);
        let row = node_feature_map(paths.graph(0).root_paths(0), &labelings[0], 0, &vocab).unwrap();
        assert_eq!(vocab.len(), 1);
        assert_eq!(row.total(), 1);
    }

    #[test]
    fn graph_map_is_the_hand_enumerated_sum() {
        let ds = fixtures::example_pair_dataset();
        let paths = all_shortest_paths(&ds, 1);
        let labelings = augment_labels(&ds, 0);
        let vocab = build_vocabulary(&paths, &labelings[0]);
        let rows: Vec<SparseRow> = (0..6)
            .map(|v| {
                node_feature_map(paths.graph(0).root_paths(v), &labelings[0], 0, &vocab).unwrap()
            })
            .collect();
        let matrix = NodeFeatureMatrix::new(0, vocab.len(), rows);
        let vector = graph_feature_map(&matrix);
        let expected: Vec<(&[u32], u64)> = vec![
            (&[1], 2),
            (&[1, 3], 1),
            (&[1, 4], 1),
            (&[2], 1),
            (&[2, 3], 1),
            (&[3], 2),
            (&[3, 1], 1),
            (&[3, 2], 1),
            (&[3, 4], 2),
            (&[4], 1),
            (&[4, 1], 1),
            (&[4, 3], 2),
        ];
        for (rep, count) in expected {
            assert_eq!(vector.vector().count_at(rep_of(&vocab, rep)), count, "{rep:?}");
        }
        assert_eq!(vector.vector().total(), 16);
    }

    #[test]
    fn multiscale_representations_of_example_root() {
        // at scale 2 the four paths from the label-4 root share a first
        // label and keep their endpoint labels distinct; frozen against the
        // dictionary this encoding produces
        let ds = fixtures::example_pair_dataset();
        let paths = all_shortest_paths(&ds, 1);
        let labelings = augment_labels(&ds, 2);
        let scale2 = &labelings[2];
        let reps: Vec<Vec<u32>> = paths
            .graph(0)
            .root_paths(0)
            .iter()
            .map(|p| path_representation(p, scale2, 0))
            .collect();
        assert_eq!(reps, vec![vec![10], vec![10, 4], vec![10, 8], vec![10, 7]]);
    }

    #[test]
    fn concat_of_single_block_is_identity() {
        let row = SparseRow::new(3, vec![(0, 2), (2, 1)]);
        assert_eq!(multiscale_concat(&[row.clone()]).unwrap(), row);
        assert!(multiscale_concat(&[]).is_err());
    }

    #[test]
    fn concat_width_is_additive_and_blockwise() {
        let a = SparseRow::new(14, vec![(0, 1), (13, 2)]);
        let b = SparseRow::new(20, vec![(5, 3)]);
        let c = multiscale_concat(&[a, b]).unwrap();
        assert_eq!(c.width(), 34);
        assert_eq!(c.count_at(0), 1);
        assert_eq!(c.count_at(13), 2);
        assert_eq!(c.count_at(19), 3);
    }

    #[test]
    fn feature_matrices_satisfy_row_sum_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let ds = fixtures::random_dataset(&mut rng, 8, 9);
        for (d, k) in [(1, 0), (2, 1), (3, 2)] {
            let matrices = build_feature_matrices(&ds, d, k).unwrap();
            let paths = all_shortest_paths(&ds, d);
            for matrix in &matrices {
                let g = matrix.graph();
                // per-node total = (k+1) * number of paths at that node
                for (v, row) in matrix.rows().iter().enumerate() {
                    let path_count = paths.graph(g).root_paths(v).len() as u64;
                    assert_eq!(row.total(), (k as u64 + 1) * path_count);
                }
                // graph vector equals the exact row sum
                let vector = graph_feature_map(matrix);
                let mut expected = SparseRow::new(matrix.width(), Vec::new());
                for row in matrix.rows() {
                    expected.add_assign(row);
                }
                assert_eq!(vector.vector(), &expected);
            }
        }
    }

    #[test]
    fn column_permutation_preserves_pairwise_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let width = 10;
        let rows: Vec<SparseRow> = (0..6)
            .map(|_| {
                let mut entries = Vec::new();
                for c in 0..width {
                    if rng.gen_bool(0.5) {
                        entries.push((c, rng.gen_range(1..5)));
                    }
                }
                SparseRow::new(width, entries)
            })
            .collect();
        let mut perm: Vec<usize> = (0..width).collect();
        use rand::seq::SliceRandom;
        perm.shuffle(&mut rng);
        let permuted: Vec<SparseRow> = rows
            .iter()
            .map(|r| {
                SparseRow::new(
                    width,
                    r.entries().iter().map(|&(c, n)| (perm[c], n)).collect(),
                )
            })
            .collect();
        for i in 0..rows.len() {
            for j in 0..rows.len() {
                let a = rows[i].euclidean_distance(&rows[j]);
                let b = permuted[i].euclidean_distance(&permuted[j]);
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sparse_distance_matches_dense_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..100 {
            let width = rng.gen_range(1..12);
            let make = |rng: &mut ChaCha8Rng| {
                let mut entries = Vec::new();
                for c in 0..width {
                    if rng.gen_bool(0.4) {
                        entries.push((c, rng.gen_range(1..9)));
                    }
                }
                SparseRow::new(width, entries)
            };
            let x = make(&mut rng);
            let y = make(&mut rng);
            let dense: f64 = (0..width)
                .map(|c| {
                    let d = x.count_at(c) as f64 - y.count_at(c) as f64;
                    d * d
                })
                .sum::<f64>()
                .sqrt();
            assert!((x.euclidean_distance(&y) - dense).abs() < 1e-12);
        }
    }

    #[test]
    fn path_graph_scale_zero_counts_match_hand_enumeration() {
        // P4 with uniform labels at d=3: node 0 reaches nodes at distances
        // 0..3, so its row counts one path of each length
        let g = fixtures::path_graph(4);
        let ds = crate::graph::GraphDataset::new("p4", vec![g], vec![0]).unwrap();
        let matrices = build_feature_matrices(&ds, 3, 0).unwrap();
        let paths = all_shortest_paths(&ds, 3);
        assert_eq!(paths.graph(0).root_paths(0).len(), 4);
        let labelings = augment_labels(&ds, 0);
        let vocab = build_vocabulary(&paths, &labelings[0]);
        let row0 = &matrices[0].rows()[0];
        for len in 1..=4usize {
            let rep = vec![1u32; len];
            assert_eq!(row0.count_at(vocab.column_of(&rep).unwrap()), 1);
        }
        // middle node 1 reaches: itself, two at distance 1, one at 2
        let row1 = &matrices[0].rows()[1];
        assert_eq!(row1.count_at(vocab.column_of(&vec![1u32; 2]).unwrap()), 2);
        assert_eq!(row1.count_at(vocab.column_of(&vec![1u32; 3]).unwrap()), 1);
    }
}
