//! Canonical encoding of rooted labeled trees and multi-scale node
//! relabeling.
//!
//! Every node's truncated BFS tree of depth `i` is rendered into a token
//! string that is identical for isomorphic rooted labeled trees and
//! distinct otherwise. Sorting the unique strings of a whole dataset and
//! indexing them 1-based yields the scale-`i` label of each node.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;

use crate::graph::GraphDataset;
use crate::paths::{self, BfsTree};

/// One token of a canonical tree string. The derived ordering (groupers and
/// separator before labels, labels compared numerically) makes comparison
/// of token sequences independent of how many digits a label needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonToken {
    Close,
    Sep,
    Open,
    Label(u32),
}

/// Canonical string of a rooted labeled tree: the root label followed by a
/// parenthesized, comma-separated list of child encodings, children sorted
/// ascending. Leaves are bare labels.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonString(Vec<CanonToken>);

impl CanonString {
    pub fn tokens(&self) -> &[CanonToken] {
        &self.0
    }
}

impl fmt::Display for CanonString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for token in &self.0 {
            match token {
                CanonToken::Close => write!(f, ")")?,
                CanonToken::Sep => write!(f, ",")?,
                CanonToken::Open => write!(f, "(")?,
                CanonToken::Label(l) => write!(f, "{l}")?,
            }
        }
        Ok(())
    }
}

/// Encodes a truncated BFS tree against a per-node label view. Children are
/// ordered by their own encodings (which begin with the child label, so this
/// is label-ascending with encoding as tiebreak); the result does not depend
/// on the order children were discovered in.
pub fn canonical_tree_string(tree: &BfsTree, labels: &[u32]) -> CanonString {
    let children = tree.children_positions();
    let mut tokens = Vec::new();
    encode_position(tree, &children, labels, 0, &mut tokens);
    CanonString(tokens)
}

fn encode_position(
    tree: &BfsTree,
    children: &[Vec<usize>],
    labels: &[u32],
    pos: usize,
    out: &mut Vec<CanonToken>,
) {
    out.push(CanonToken::Label(labels[tree.members()[pos]]));
    if children[pos].is_empty() {
        return;
    }
    let mut encoded: Vec<Vec<CanonToken>> = children[pos]
        .iter()
        .map(|&child| {
            let mut tokens = Vec::new();
            encode_position(tree, children, labels, child, &mut tokens);
            tokens
        })
        .collect();
    encoded.sort_unstable();
    out.push(CanonToken::Open);
    for (i, child_tokens) in encoded.iter().enumerate() {
        if i > 0 {
            out.push(CanonToken::Sep);
        }
        out.extend_from_slice(child_tokens);
    }
    out.push(CanonToken::Close);
}

/// The dataset-global dictionary of unique depth-`scale` trees: canonical
/// strings sorted ascending, labeled by their 1-based sorted position.
#[derive(Debug, Clone)]
pub struct TreeDictionary {
    scale: usize,
    entries: Vec<CanonString>,
    index: HashMap<CanonString, u32>,
}

impl TreeDictionary {
    fn from_strings(scale: usize, mut strings: Vec<CanonString>) -> Self {
        strings.sort_unstable();
        strings.dedup();
        let index = strings
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32 + 1))
            .collect();
        TreeDictionary {
            scale,
            entries: strings,
            index,
        }
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn label_of(&self, string: &CanonString) -> Option<u32> {
        self.index.get(string).copied()
    }

    pub fn entries(&self) -> &[CanonString] {
        &self.entries
    }

    /// One `scale<TAB>label<TAB>string` record per line, for golden tests.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, entry) in self.entries.iter().enumerate() {
            out.push_str(&format!("{}\t{}\t{}\n", self.scale, i + 1, entry));
        }
        out
    }
}

/// Node labels at one scale: `labels[graph][node]` is the dictionary label
/// of the node's depth-`scale` tree.
#[derive(Debug, Clone)]
pub struct ScaleLabeling {
    scale: usize,
    labels: Vec<Vec<u32>>,
}

impl ScaleLabeling {
    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn label(&self, graph: usize, node: usize) -> u32 {
        self.labels[graph][node]
    }

    pub fn graph_labels(&self, graph: usize) -> &[u32] {
        &self.labels[graph]
    }
}

/// Canonical strings of the depth-`scale` tree at every node, in
/// (graph, node) order. Parallel over graphs, deterministic output.
fn all_canon_strings(dataset: &GraphDataset, scale: usize) -> Vec<Vec<CanonString>> {
    dataset
        .graphs()
        .par_iter()
        .map(|graph| {
            let order = paths::canonical_visit_order(graph);
            let labels = graph.labels().expect("labeled dataset required");
            (0..graph.node_count())
                .map(|root| {
                    let tree = paths::truncated_bfs_tree_with_order(graph, &order, root, scale);
                    canonical_tree_string(&tree, labels)
                })
                .collect()
        })
        .collect()
}

/// Builds the scale-`scale` tree dictionary over the whole dataset.
pub fn build_scale_dictionary(dataset: &GraphDataset, scale: usize) -> TreeDictionary {
    let strings = all_canon_strings(dataset, scale);
    TreeDictionary::from_strings(scale, strings.into_iter().flatten().collect())
}

/// Relabels every node at every scale 0..=k. Index the result as
/// `[scale][graph][node]`.
pub fn augment_labels(dataset: &GraphDataset, k: usize) -> Vec<ScaleLabeling> {
    (0..=k)
        .map(|scale| {
            let strings = all_canon_strings(dataset, scale);
            let dictionary =
                TreeDictionary::from_strings(scale, strings.iter().flatten().cloned().collect());
            let labels = strings
                .iter()
                .map(|graph_strings| {
                    graph_strings
                        .iter()
                        .map(|s| dictionary.label_of(s).expect("dictionary covers all trees"))
                        .collect()
                })
                .collect();
            ScaleLabeling { scale, labels }
        })
        .collect()
}
