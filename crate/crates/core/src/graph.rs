//! Undirected labeled graphs, datasets, surrogate labeling, and statistics.
//!
//! Graphs are immutable after construction: adjacency lists are symmetric,
//! sorted ascending, free of self-loops and duplicates, and node labels
//! (when present) are positive integers.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};

/// An immutable undirected graph with optional positive integer node labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    node_labels: Option<Vec<u32>>,
}

impl Graph {
    /// Builds a graph from an undirected edge list. Edges may appear in
    /// either or both directions; duplicates are collapsed. Self-loops and
    /// out-of-range endpoints are rejected.
    pub fn from_edges(
        node_count: usize,
        edges: &[(usize, usize)],
        node_labels: Option<Vec<u32>>,
    ) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in edges {
            if u >= node_count {
                return Err(Error::NodeIndex {
                    index: u,
                    count: node_count,
                });
            }
            if v >= node_count {
                return Err(Error::NodeIndex {
                    index: v,
                    count: node_count,
                });
            }
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at node {u}")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        if let Some(labels) = &node_labels {
            if labels.len() != node_count {
                return Err(Error::Dimension(format!(
                    "{} labels for {} nodes",
                    labels.len(),
                    node_count
                )));
            }
            if let Some(pos) = labels.iter().position(|&l| l == 0) {
                return Err(Error::InvalidInput(format!(
                    "node {pos} has nonpositive label"
                )));
            }
        }
        Ok(Graph {
            adjacency,
            node_labels,
        })
    }

    /// Wraps raw parts without checking any invariant. Intended for
    /// diagnostics and tests that need to construct invalid graphs; use
    /// [`validate_graph`] to inspect the result.
    pub fn from_raw_parts(adjacency: Vec<Vec<usize>>, node_labels: Option<Vec<u32>>) -> Self {
        Graph {
            adjacency,
            node_labels,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn is_labeled(&self) -> bool {
        self.node_labels.is_some()
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.node_labels.as_deref()
    }

    /// Label of node `v`. Panics if the graph is unlabeled.
    pub fn label(&self, v: usize) -> u32 {
        self.node_labels
            .as_ref()
            .expect("graph has no node labels")[v]
    }

    /// Returns a copy with the given labels installed.
    pub fn with_labels(&self, labels: Vec<u32>) -> Result<Self> {
        if labels.len() != self.node_count() {
            return Err(Error::Dimension(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.node_count()
            )));
        }
        Ok(Graph {
            adjacency: self.adjacency.clone(),
            node_labels: Some(labels),
        })
    }

    /// Sorted list of undirected edges (u, v) with u < v.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (u, neighbors) in self.adjacency.iter().enumerate() {
            for &v in neighbors {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Hop distance from `root` to every node; `None` for unreachable nodes.
    pub fn bfs_distances(&self, root: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.node_count()];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }
}

/// One invariant violation found by [`validate_graph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { node: usize },
    DuplicateNeighbor { node: usize, neighbor: usize },
    Asymmetric { from: usize, to: usize },
    NeighborOutOfRange { node: usize, neighbor: usize },
    UnsortedNeighbors { node: usize },
    NonPositiveLabel { node: usize },
    LabelCountMismatch { labels: usize, nodes: usize },
}

/// Reports every invariant violation in `graph`; an empty vector means the
/// graph is valid. Purely diagnostic, never fails.
pub fn validate_graph(graph: &Graph) -> Vec<Violation> {
    let n = graph.adjacency.len();
    let mut violations = Vec::new();
    for (u, neighbors) in graph.adjacency.iter().enumerate() {
        if !neighbors.windows(2).all(|w| w[0] < w[1]) {
            if neighbors.windows(2).any(|w| w[0] == w[1]) {
                for w in neighbors.windows(2) {
                    if w[0] == w[1] {
                        violations.push(Violation::DuplicateNeighbor {
                            node: u,
                            neighbor: w[0],
                        });
                    }
                }
            }
            if !neighbors.windows(2).all(|w| w[0] <= w[1]) {
                violations.push(Violation::UnsortedNeighbors { node: u });
            }
        }
        for &v in neighbors {
            if v >= n {
                violations.push(Violation::NeighborOutOfRange { node: u, neighbor: v });
                continue;
            }
            if v == u {
                violations.push(Violation::SelfLoop { node: u });
                continue;
            }
            if !graph.adjacency[v].contains(&u) {
                violations.push(Violation::Asymmetric { from: u, to: v });
            }
        }
    }
    if let Some(labels) = &graph.node_labels {
        if labels.len() != n {
            violations.push(Violation::LabelCountMismatch {
                labels: labels.len(),
                nodes: n,
            });
        }
        for (v, &l) in labels.iter().enumerate() {
            if l == 0 {
                violations.push(Violation::NonPositiveLabel { node: v });
            }
        }
    }
    violations
}

/// How to synthesize node labels for unlabeled datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurrogateMode {
    /// degree + 1, so isolated nodes still get a positive label
    Degree,
    /// every node labeled 1
    Uniform,
}

/// A named collection of graphs with one class label per graph.
#[derive(Debug, Clone)]
pub struct GraphDataset {
    name: String,
    graphs: Vec<Graph>,
    class_labels: Vec<i64>,
}

impl GraphDataset {
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>, class_labels: Vec<i64>) -> Result<Self> {
        if graphs.len() != class_labels.len() {
            return Err(Error::Dimension(format!(
                "{} graphs but {} class labels",
                graphs.len(),
                class_labels.len()
            )));
        }
        Ok(GraphDataset {
            name: name.into(),
            graphs,
            class_labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn graphs(&self) -> &[Graph] {
        &self.graphs
    }

    pub fn graph(&self, i: usize) -> &Graph {
        &self.graphs[i]
    }

    pub fn class_labels(&self) -> &[i64] {
        &self.class_labels
    }

    /// Number of distinct class labels.
    pub fn class_count(&self) -> usize {
        let mut classes: Vec<i64> = self.class_labels.clone();
        classes.sort_unstable();
        classes.dedup();
        classes.len()
    }

    /// True when every graph carries node labels.
    pub fn is_labeled(&self) -> bool {
        self.graphs.iter().all(Graph::is_labeled)
    }

    /// Replaces node labels with surrogate ones. Refuses to overwrite an
    /// already-labeled dataset unless `overwrite` is set.
    pub fn with_surrogate_labels(&self, mode: SurrogateMode, overwrite: bool) -> Result<Self> {
        if self.is_labeled() && !self.graphs.is_empty() && !overwrite {
            return Err(Error::Precondition(format!(
                "dataset {} already has node labels; pass the override flag to replace them",
                self.name
            )));
        }
        let graphs = self
            .graphs
            .iter()
            .map(|g| {
                let labels = match mode {
                    SurrogateMode::Degree => {
                        (0..g.node_count()).map(|v| g.degree(v) as u32 + 1).collect()
                    }
                    SurrogateMode::Uniform => vec![1; g.node_count()],
                };
                g.with_labels(labels)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GraphDataset {
            name: self.name.clone(),
            graphs,
            class_labels: self.class_labels.clone(),
        })
    }
}

/// Averaging convention for the mean shortest-path length statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpLengthMode {
    /// Mean over graphs of each graph's mean pair distance.
    #[default]
    PerGraphMean,
    /// Single mean over all connected node pairs in the dataset.
    Pooled,
}

/// Per-dataset summary statistics.
#[derive(Debug, Clone, Serialize)]
pub struct StatsReport {
    pub name: String,
    pub size: usize,
    pub class_count: usize,
    pub avg_nodes: f64,
    pub avg_edges: f64,
    /// `None` when the dataset has no node labels.
    pub node_label_count: Option<usize>,
    pub mean_sp_length: f64,
    pub max_sp_length: usize,
}

/// Computes dataset statistics. Shortest-path lengths range over unordered
/// pairs of distinct nodes; disconnected pairs are excluded.
pub fn dataset_statistics(dataset: &GraphDataset, mode: SpLengthMode) -> Result<StatsReport> {
    if dataset.is_empty() {
        return Err(Error::Precondition("empty dataset".into()));
    }
    let n = dataset.len() as f64;
    let avg_nodes = dataset.graphs().iter().map(|g| g.node_count() as f64).sum::<f64>() / n;
    let avg_edges = dataset.graphs().iter().map(|g| g.edge_count() as f64).sum::<f64>() / n;

    let node_label_count = if dataset.is_labeled() {
        let mut labels: Vec<u32> = dataset
            .graphs()
            .iter()
            .flat_map(|g| g.labels().unwrap().iter().copied())
            .collect();
        labels.sort_unstable();
        labels.dedup();
        Some(labels.len())
    } else {
        None
    };

    let mut max_sp = 0usize;
    let mut per_graph_means = Vec::new();
    let mut pooled_sum = 0.0f64;
    let mut pooled_count = 0u64;
    for graph in dataset.graphs() {
        let mut sum = 0u64;
        let mut count = 0u64;
        for root in 0..graph.node_count() {
            for (v, dist) in graph.bfs_distances(root).into_iter().enumerate() {
                if v <= root {
                    continue;
                }
                if let Some(d) = dist {
                    sum += d as u64;
                    count += 1;
                    max_sp = max_sp.max(d);
                }
            }
        }
        if count > 0 {
            per_graph_means.push(sum as f64 / count as f64);
        }
        pooled_sum += sum as f64;
        pooled_count += count;
    }
    let mean_sp_length = match mode {
        SpLengthMode::PerGraphMean => {
            if per_graph_means.is_empty() {
                0.0
            } else {
                per_graph_means.iter().sum::<f64>() / per_graph_means.len() as f64
            }
        }
        SpLengthMode::Pooled => {
            if pooled_count == 0 {
                0.0
            } else {
                pooled_sum / pooled_count as f64
            }
        }
    };

    Ok(StatsReport {
        name: dataset.name().to_string(),
        size: dataset.len(),
        class_count: dataset.class_count(),
        avg_nodes,
        avg_edges,
        node_label_count,
        mean_sp_length,
        max_sp_length: max_sp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn from_edges_symmetrizes_and_dedupes() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 0), (1, 2), (1, 2)], None).unwrap();
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0, 2]);
        assert_eq!(g.neighbors(2), &[1]);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn from_edges_rejects_self_loop_and_bad_index() {
        assert!(matches!(
            Graph::from_edges(2, &[(0, 0)], None),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            Graph::from_edges(2, &[(0, 5)], None),
            Err(Error::NodeIndex { index: 5, count: 2 })
        ));
    }

    #[test]
    fn minimal_two_node_graph() {
        let g = Graph::from_edges(2, &[(0, 1)], None).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.neighbors(0), &[1]);
        assert_eq!(g.neighbors(1), &[0]);
    }

    #[test]
    fn validate_accepts_worked_example_graph() {
        let (g1, _) = fixtures::example_pair_graphs();
        assert_eq!(g1.node_count(), 6);
        assert_eq!(g1.edge_count(), 5);
        assert!(validate_graph(&g1).is_empty());
    }

    #[test]
    fn validate_reports_self_loop() {
        let g = Graph::from_raw_parts(vec![vec![0]], None);
        assert!(validate_graph(&g).contains(&Violation::SelfLoop { node: 0 }));
    }

    #[test]
    fn validate_reports_asymmetry() {
        let g = Graph::from_raw_parts(vec![vec![1], vec![]], None);
        assert!(validate_graph(&g).contains(&Violation::Asymmetric { from: 0, to: 1 }));
    }

    #[test]
    fn validate_reports_duplicates_and_zero_labels() {
        let g = Graph::from_raw_parts(vec![vec![1, 1], vec![0]], Some(vec![0, 2]));
        let v = validate_graph(&g);
        assert!(v.contains(&Violation::DuplicateNeighbor { node: 0, neighbor: 1 }));
        assert!(v.contains(&Violation::NonPositiveLabel { node: 0 }));
    }

    #[test]
    fn surrogate_degree_labels_star() {
        // star: center 0 with three leaves
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)], None).unwrap();
        let ds = GraphDataset::new("star", vec![g], vec![0]).unwrap();
        let labeled = ds.with_surrogate_labels(SurrogateMode::Degree, false).unwrap();
        assert_eq!(labeled.graph(0).labels().unwrap(), &[4, 2, 2, 2]);
    }

    #[test]
    fn surrogate_uniform_labels() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], None).unwrap();
        let ds = GraphDataset::new("p3", vec![g], vec![0]).unwrap();
        let labeled = ds.with_surrogate_labels(SurrogateMode::Uniform, false).unwrap();
        assert_eq!(labeled.graph(0).labels().unwrap(), &[1, 1, 1]);
    }

    #[test]
    fn surrogate_refuses_labeled_dataset_without_override() {
        let g = Graph::from_edges(2, &[(0, 1)], Some(vec![1, 2])).unwrap();
        let ds = GraphDataset::new("tiny", vec![g], vec![0]).unwrap();
        assert!(matches!(
            ds.with_surrogate_labels(SurrogateMode::Degree, false),
            Err(Error::Precondition(_))
        ));
        assert!(ds.with_surrogate_labels(SurrogateMode::Degree, true).is_ok());
    }

    #[test]
    fn statistics_on_triangle() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)], Some(vec![1, 1, 1])).unwrap();
        let ds = GraphDataset::new("triangle", vec![g], vec![0]).unwrap();
        let stats = dataset_statistics(&ds, SpLengthMode::PerGraphMean).unwrap();
        assert_eq!(stats.mean_sp_length, 1.0);
        assert_eq!(stats.max_sp_length, 1);
        assert_eq!(stats.avg_edges, 3.0);
    }

    #[test]
    fn statistics_on_path_graph() {
        // pairs of P3: (0,1)=1, (1,2)=1, (0,2)=2 -> mean 4/3, diameter 2
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)], Some(vec![1, 1, 1])).unwrap();
        let ds = GraphDataset::new("p3", vec![g], vec![0]).unwrap();
        let stats = dataset_statistics(&ds, SpLengthMode::PerGraphMean).unwrap();
        assert!((stats.mean_sp_length - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(stats.max_sp_length, 2);
    }

    #[test]
    fn statistics_exclude_disconnected_pairs() {
        // two components: an edge and an isolated node
        let g = Graph::from_edges(3, &[(0, 1)], Some(vec![1, 1, 1])).unwrap();
        let ds = GraphDataset::new("split", vec![g], vec![0]).unwrap();
        let stats = dataset_statistics(&ds, SpLengthMode::PerGraphMean).unwrap();
        assert_eq!(stats.mean_sp_length, 1.0);
        assert_eq!(stats.max_sp_length, 1);
    }

    #[test]
    fn statistics_reject_empty_dataset() {
        let ds = GraphDataset::new("empty", vec![], vec![]).unwrap();
        assert!(dataset_statistics(&ds, SpLengthMode::PerGraphMean).is_err());
    }

    #[test]
    fn statistics_invariant_under_vertex_permutation() {
        let (g1, g2) = fixtures::example_pair_graphs();
        let ds = GraphDataset::new("pair", vec![g1.clone(), g2], vec![0, 1]).unwrap();
        // permute g1's vertices by reversal
        let n = g1.node_count();
        let perm: Vec<usize> = (0..n).rev().collect();
        let edges: Vec<(usize, usize)> =
            g1.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let mut labels = vec![0u32; n];
        for v in 0..n {
            labels[perm[v]] = g1.label(v);
        }
        let g1p = Graph::from_edges(n, &edges, Some(labels)).unwrap();
        let ds_p =
            GraphDataset::new("pair", vec![g1p, ds.graph(1).clone()], vec![0, 1]).unwrap();
        let a = dataset_statistics(&ds, SpLengthMode::PerGraphMean).unwrap();
        let b = dataset_statistics(&ds_p, SpLengthMode::PerGraphMean).unwrap();
        assert_eq!(a.avg_nodes, b.avg_nodes);
        assert_eq!(a.avg_edges, b.avg_edges);
        assert_eq!(a.mean_sp_length, b.mean_sp_length);
        assert_eq!(a.max_sp_length, b.max_sp_length);
        assert_eq!(a.node_label_count, b.node_label_count);
    }
}
