//! Truncated breadth-first search trees and root-to-node shortest-path
//! enumeration.
//!
//! A tree of depth `d` rooted at `v` contains every node within `d` hops of
//! `v`; following parent links from any member back to the root traces one
//! shortest path. Neighbor expansion follows a canonical
//! (label, degree, index) order so ties between equally short discoveries
//! resolve deterministically.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphDataset};

/// A breadth-first tree truncated at a fixed depth. Members are stored in
/// discovery order (root first); parents are positions into `members`.
#[derive(Debug, Clone)]
pub struct BfsTree {
    root: usize,
    members: Vec<usize>,
    parent_pos: Vec<Option<usize>>,
    depth_of: Vec<usize>,
}

impl BfsTree {
    pub fn root(&self) -> usize {
        self.root
    }

    /// Graph node ids in discovery order; `members()[0]` is the root.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Position (into `members`) of each member's parent; the root has none.
    pub fn parent_positions(&self) -> &[Option<usize>] {
        &self.parent_pos
    }

    /// Hop distance from the root, per member.
    pub fn depths(&self) -> &[usize] {
        &self.depth_of
    }

    /// Child positions per member position, in discovery order.
    pub fn children_positions(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.members.len()];
        for (pos, parent) in self.parent_pos.iter().enumerate() {
            if let Some(p) = parent {
                children[*p].push(pos);
            }
        }
        children
    }
}

/// Neighbor lists reordered by ascending (label, degree, index); the order
/// BFS uses to expand each frontier node. Unlabeled graphs fall back to
/// (degree, index).
pub fn canonical_visit_order(graph: &Graph) -> Vec<Vec<usize>> {
    let key = |v: usize| {
        (
            graph.labels().map_or(0, |l| l[v]),
            graph.degree(v),
            v,
        )
    };
    (0..graph.node_count())
        .map(|u| {
            let mut neighbors = graph.neighbors(u).to_vec();
            neighbors.sort_unstable_by_key(|&v| key(v));
            neighbors
        })
        .collect()
}

/// Same as [`truncated_bfs_tree`] but reuses a precomputed visit order,
/// which saves re-sorting adjacency when many roots of one graph are
/// expanded.
pub fn truncated_bfs_tree_with_order(
    graph: &Graph,
    visit_order: &[Vec<usize>],
    root: usize,
    depth: usize,
) -> BfsTree {
    let mut members = vec![root];
    let mut parent_pos = vec![None];
    let mut depth_of = vec![0usize];
    let mut seen = vec![false; graph.node_count()];
    seen[root] = true;
    // `members` doubles as the BFS queue: positions are processed in order
    let mut head = 0;
    while head < members.len() {
        let u = members[head];
        let du = depth_of[head];
        if du == depth {
            break; // BFS order: all remaining entries are at least this deep
        }
        for &v in &visit_order[u] {
            if !seen[v] {
                seen[v] = true;
                members.push(v);
                parent_pos.push(Some(head));
                depth_of.push(du + 1);
            }
        }
        head += 1;
    }
    BfsTree {
        root,
        members,
        parent_pos,
        depth_of,
    }
}

/// Builds the truncated BFS tree of the given depth rooted at `root`.
pub fn truncated_bfs_tree(graph: &Graph, root: usize, depth: usize) -> Result<BfsTree> {
    if root >= graph.node_count() {
        return Err(Error::NodeIndex {
            index: root,
            count: graph.node_count(),
        });
    }
    let order = canonical_visit_order(graph);
    Ok(truncated_bfs_tree_with_order(graph, &order, root, depth))
}

/// One root-to-member path per tree member, ordered by (depth, discovery
/// order). Each path starts at the root; the first path is the length-zero
/// path `[root]`.
pub fn enumerate_root_paths(tree: &BfsTree) -> Vec<Vec<usize>> {
    tree.members()
        .iter()
        .enumerate()
        .map(|(pos, _)| {
            let mut path = Vec::with_capacity(tree.depth_of[pos] + 1);
            let mut cursor = Some(pos);
            while let Some(p) = cursor {
                path.push(tree.members[p]);
                cursor = tree.parent_pos[p];
            }
            path.reverse();
            path
        })
        .collect()
}

/// All root paths of one graph: `per_root[v]` lists the paths of the tree
/// rooted at `v`.
#[derive(Debug, Clone)]
pub struct GraphPaths {
    per_root: Vec<Vec<Vec<usize>>>,
}

impl GraphPaths {
    pub fn roots(&self) -> usize {
        self.per_root.len()
    }

    pub fn root_paths(&self, v: usize) -> &[Vec<usize>] {
        &self.per_root[v]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<Vec<usize>>> {
        self.per_root.iter()
    }

    pub fn path_count(&self) -> usize {
        self.per_root.iter().map(Vec::len).sum()
    }
}

/// Every root path of every graph in a dataset, extracted at one depth.
#[derive(Debug, Clone)]
pub struct RootPathSet {
    depth: usize,
    per_graph: Vec<GraphPaths>,
}

impl RootPathSet {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn graph_count(&self) -> usize {
        self.per_graph.len()
    }

    pub fn graph(&self, g: usize) -> &GraphPaths {
        &self.per_graph[g]
    }

    pub fn iter(&self) -> impl Iterator<Item = &GraphPaths> {
        self.per_graph.iter()
    }

    pub fn total_path_count(&self) -> usize {
        self.per_graph.iter().map(GraphPaths::path_count).sum()
    }

    /// Paths as comma-joined label strings, one per line, in
    /// (graph, root, path) order. Requires a labeled dataset.
    pub fn dump_labeled(&self, dataset: &GraphDataset) -> String {
        let mut out = String::new();
        for (g, graph_paths) in self.per_graph.iter().enumerate() {
            let graph = dataset.graph(g);
            for root_paths in graph_paths.iter() {
                for path in root_paths {
                    let labels: Vec<String> =
                        path.iter().map(|&v| graph.label(v).to_string()).collect();
                    out.push_str(&labels.join(","));
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Extracts the truncated BFS tree of depth `d` at every node of every
/// graph and enumerates its root paths. Work is parallel over graphs;
/// output order is fixed as (graph, node).
pub fn all_shortest_paths(dataset: &GraphDataset, d: usize) -> RootPathSet {
    let per_graph: Vec<GraphPaths> = dataset
        .graphs()
        .par_iter()
        .map(|graph| {
            let order = canonical_visit_order(graph);
            let per_root = (0..graph.node_count())
                .map(|root| enumerate_root_paths(&truncated_bfs_tree_with_order(graph, &order, root, d)))
                .collect();
            GraphPaths { per_root }
        })
        .collect();
    RootPathSet {
        depth: d,
        per_graph,
    }
}

/// Counts paths and their total node length without materializing them;
/// used to bound memory before a full extraction.
pub fn count_paths(dataset: &GraphDataset, d: usize) -> (usize, usize) {
    dataset
        .graphs()
        .par_iter()
        .map(|graph| {
            let order = canonical_visit_order(graph);
            let mut count = 0usize;
            let mut total_len = 0usize;
            for root in 0..graph.node_count() {
                let tree = truncated_bfs_tree_with_order(graph, &order, root, d);
                count += tree.len();
                total_len += tree.depths().iter().map(|&dep| dep + 1).sum::<usize>();
            }
            (count, total_len)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Graph;

    fn label_strings(graph: &Graph, paths: &[Vec<usize>]) -> Vec<String> {
        paths
            .iter()
            .map(|p| {
                p.iter()
                    .map(|&v| graph.label(v).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    }

    #[test]
    fn depth_one_tree_of_first_example_graph() {
        let (g1, _) = fixtures::example_pair_graphs();
        let tree = truncated_bfs_tree(&g1, 0, 1).unwrap();
        let mut child_labels: Vec<u32> =
            tree.members()[1..].iter().map(|&v| g1.label(v)).collect();
        child_labels.sort_unstable();
        assert_eq!(child_labels, vec![1, 3, 3]);
        let paths = enumerate_root_paths(&tree);
        assert_eq!(
            label_strings(&g1, &paths),
            vec!["4", "4,1", "4,3", "4,3"]
        );
    }

    #[test]
    fn depth_one_tree_of_second_example_graph() {
        let (_, g2) = fixtures::example_pair_graphs();
        let tree = truncated_bfs_tree(&g2, 0, 1).unwrap();
        let paths = enumerate_root_paths(&tree);
        assert_eq!(
            label_strings(&g2, &paths),
            vec!["4", "4,1", "4,2", "4,3", "4,3"]
        );
    }

    #[test]
    fn depth_zero_tree_is_the_root_alone() {
        let (g1, _) = fixtures::example_pair_graphs();
        let tree = truncated_bfs_tree(&g1, 3, 0).unwrap();
        assert_eq!(tree.members(), &[3]);
        assert_eq!(enumerate_root_paths(&tree), vec![vec![3]]);
    }

    #[test]
    fn root_out_of_range_is_an_index_error() {
        let (g1, _) = fixtures::example_pair_graphs();
        assert!(matches!(
            truncated_bfs_tree(&g1, 6, 1),
            Err(crate::error::Error::NodeIndex { index: 6, count: 6 })
        ));
    }

    #[test]
    fn four_cycle_antipodal_parent_is_canonical() {
        // C4 has two shortest paths to the antipodal node; the canonical
        // order (uniform labels, equal degrees, so index decides) makes
        // node 1 the parent of node 2.
        let c4 = fixtures::cycle_graph(4);
        let tree = truncated_bfs_tree(&c4, 0, 2).unwrap();
        assert_eq!(tree.len(), 4);
        assert_eq!(tree.members(), &[0, 1, 3, 2]);
        let antipodal_pos = tree.members().iter().position(|&v| v == 2).unwrap();
        let parent_pos = tree.parent_positions()[antipodal_pos].unwrap();
        assert_eq!(tree.members()[parent_pos], 1);
    }

    #[test]
    fn path_count_matches_degree_sum_at_depth_one() {
        // every depth-1 tree holds the root plus its neighbors, so the
        // dataset-wide count is |V| + sum of degrees = |V| + 2|E|
        let ds = fixtures::example_pair_dataset();
        let paths = all_shortest_paths(&ds, 1);
        let g1_paths = paths.graph(0).path_count();
        assert_eq!(g1_paths, 6 + 2 * ds.graph(0).edge_count());
        assert_eq!(g1_paths, 16);
    }

    #[test]
    fn depth_zero_extraction_gives_singletons() {
        let ds = fixtures::example_pair_dataset();
        let paths = all_shortest_paths(&ds, 0);
        for (g, graph_paths) in paths.iter().enumerate() {
            assert_eq!(graph_paths.path_count(), ds.graph(g).node_count());
            for (root, root_paths) in graph_paths.iter().enumerate() {
                assert_eq!(root_paths, &vec![vec![root]]);
            }
        }
    }

    #[test]
    fn emitted_paths_are_shortest_and_bounded() {
        // oracle: plain all-pairs BFS distances, computed independently
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(11);
        let ds = fixtures::random_dataset(&mut rng, 8, 10);
        let d = 3;
        let paths = all_shortest_paths(&ds, d);
        for (g, graph_paths) in paths.iter().enumerate() {
            let graph = ds.graph(g);
            for (root, root_paths) in graph_paths.iter().enumerate() {
                let dist = graph.bfs_distances(root);
                let mut reached = 0;
                for path in root_paths {
                    assert_eq!(path[0], root);
                    assert!(path.len() - 1 <= d);
                    // consecutive nodes adjacent, all distinct
                    for w in path.windows(2) {
                        assert!(graph.neighbors(w[0]).contains(&w[1]));
                    }
                    let mut sorted = path.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    assert_eq!(sorted.len(), path.len());
                    let end = *path.last().unwrap();
                    assert_eq!(dist[end], Some(path.len() - 1));
                    reached += 1;
                }
                let expected = dist.iter().filter(|o| matches!(o, Some(x) if *x <= d)).count();
                assert_eq!(reached, expected);
            }
        }
    }

    #[test]
    fn extraction_is_deterministic() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(23);
        let ds = fixtures::random_dataset(&mut rng, 6, 9);
        let a = all_shortest_paths(&ds, 2);
        let b = all_shortest_paths(&ds, 2);
        for g in 0..ds.len() {
            for v in 0..ds.graph(g).node_count() {
                assert_eq!(a.graph(g).root_paths(v), b.graph(g).root_paths(v));
            }
        }
    }

    #[test]
    fn isolated_node_yields_singleton_path() {
        let g = Graph::from_edges(3, &[(0, 1)], Some(vec![5, 5, 5])).unwrap();
        let ds = crate::graph::GraphDataset::new("iso", vec![g], vec![0]).unwrap();
        let paths = all_shortest_paths(&ds, 4);
        assert_eq!(paths.graph(0).root_paths(2), &[vec![2]]);
    }
}
