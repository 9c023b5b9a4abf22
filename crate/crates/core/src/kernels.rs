//! Gram matrix assembly for the Wasserstein shortest-path kernel family
//! and the classic triplet shortest-path baseline.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{self, NodeFeatureMatrix, SparseRow};
use crate::graph::{Graph, GraphDataset};
use crate::wasserstein;

/// Kernel family member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelVariant {
    /// Multi-scale node feature maps compared with W1.
    Mwsp,
    /// Single-scale variant: identical to Mwsp restricted to scale 0.
    Wsp,
    /// Graph-level feature vectors; W1 between singleton sets degenerates
    /// to the ground distance.
    MwspGfm,
    /// Classic triplet histogram kernel (source label, sink label, length).
    SpBaseline,
}

impl KernelVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mwsp" => Ok(KernelVariant::Mwsp),
            "wsp" => Ok(KernelVariant::Wsp),
            "mwsp-gfm" | "gfm" => Ok(KernelVariant::MwspGfm),
            "sp" | "sp-baseline" => Ok(KernelVariant::SpBaseline),
            other => Err(Error::InvalidInput(format!(
                "unknown kernel variant {other:?} (expected mwsp, wsp, mwsp-gfm, or sp)"
            ))),
        }
    }
}

impl fmt::Display for KernelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            KernelVariant::Mwsp => "mwsp",
            KernelVariant::Wsp => "wsp",
            KernelVariant::MwspGfm => "mwsp-gfm",
            KernelVariant::SpBaseline => "sp",
        };
        write!(f, "{name}")
    }
}

/// Variant plus hyperparameters: path-tree depth `d`, augmentation depth
/// `k`, and the exponential rate `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub variant: KernelVariant,
    pub d: usize,
    pub k: usize,
    pub lambda: f64,
}

impl KernelConfig {
    pub fn new(variant: KernelVariant, d: usize, k: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return Err(Error::InvalidInput(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        // the single-scale variant fixes k = 0
        let k = if variant == KernelVariant::Wsp { 0 } else { k };
        Ok(KernelConfig {
            variant,
            d,
            k,
            lambda,
        })
    }
}

/// A symmetric kernel matrix with its provenance.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    n: usize,
    values: Vec<f64>,
    pub config: KernelConfig,
    pub dataset: String,
}

impl GramMatrix {
    pub fn from_values(
        n: usize,
        values: Vec<f64>,
        config: KernelConfig,
        dataset: impl Into<String>,
    ) -> Self {
        debug_assert_eq!(values.len(), n * n);
        GramMatrix {
            n,
            values,
            config,
            dataset: dataset.into(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest |K_ij - K_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// CSV rendering: one row per line, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| format!("{:.16e}", self.get(i, j)))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Pairwise distance matrix for a kernel family member at one (d, k);
/// exponentiating it with any lambda yields the Gram values.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }
}

/// exp(-lambda * W1) between two node feature matrices.
pub fn pair_kernel(
    phi1: &NodeFeatureMatrix,
    phi2: &NodeFeatureMatrix,
    lambda: f64,
) -> Result<f64> {
    if phi1.width() != phi2.width() {
        return Err(Error::Dimension(format!(
            "feature matrices live in different column spaces ({} vs {})",
            phi1.width(),
            phi2.width()
        )));
    }
    let (w1, _) = wasserstein::solve_w1(phi1.rows(), phi2.rows())?;
    Ok((-lambda * w1).exp())
}

fn pairwise_w1(row_sets: &[Vec<SparseRow>]) -> Result<DistanceMatrix> {
    let n = row_sets.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let distances: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| wasserstein::solve_w1(&row_sets[i], &row_sets[j]).map(|(w1, _)| w1))
        .collect::<Result<_>>()?;
    let mut values = vec![0.0f64; n * n];
    for (&(i, j), &w1) in pairs.iter().zip(&distances) {
        values[i * n + j] = w1;
        values[j * n + i] = w1;
    }
    Ok(DistanceMatrix { n, values })
}

/// W1 distances between all graph pairs for a Wasserstein-family variant.
/// The diagonal is zero by the metric axiom.
pub fn build_distances(
    dataset: &GraphDataset,
    variant: KernelVariant,
    d: usize,
    k: usize,
) -> Result<DistanceMatrix> {
    if !dataset.is_labeled() {
        return Err(Error::Precondition(
            "dataset has no node labels; assign surrogate labels first".into(),
        ));
    }
    let row_sets: Vec<Vec<SparseRow>> = match variant {
        KernelVariant::Mwsp => features::build_feature_matrices(dataset, d, k)?
            .into_iter()
            .map(|m| m.rows().to_vec())
            .collect(),
        KernelVariant::Wsp => features::build_feature_matrices(dataset, d, 0)?
            .into_iter()
            .map(|m| m.rows().to_vec())
            .collect(),
        KernelVariant::MwspGfm => features::build_graph_vectors(dataset, d, k)?
            .into_iter()
            .map(|v| vec![v.vector().clone()])
            .collect(),
        KernelVariant::SpBaseline => {
            return Err(Error::InvalidInput(
                "the triplet baseline has no distance form; use sp_baseline_gram".into(),
            ))
        }
    };
    pairwise_w1(&row_sets)
}

/// Turns a distance matrix into Gram values exp(-lambda * D) with an exact
/// unit diagonal.
pub fn gram_from_distances(
    distances: &DistanceMatrix,
    config: KernelConfig,
    dataset: &str,
) -> GramMatrix {
    let n = distances.n();
    let mut values = vec![0.0f64; n * n];
    for i in 0..n {
        values[i * n + i] = 1.0;
        for j in (i + 1)..n {
            let k = (-config.lambda * distances.get(i, j)).exp();
            values[i * n + j] = k;
            values[j * n + i] = k;
        }
    }
    GramMatrix::from_values(n, values, config, dataset)
}

/// Full pipeline for one configuration: features, pairwise W1, Laplacian
/// RBF. The triplet baseline dispatches to [`sp_baseline_gram`].
pub fn build_gram(dataset: &GraphDataset, config: KernelConfig) -> Result<GramMatrix> {
    if config.variant == KernelVariant::SpBaseline {
        return sp_baseline_gram(dataset);
    }
    let distances = build_distances(dataset, config.variant, config.d, config.k)?;
    Ok(gram_from_distances(&distances, config, dataset.name()))
}

/// Histogram of (min label, max label, distance) triplets over all
/// connected unordered pairs of distinct nodes.
fn triplet_histogram(graph: &Graph) -> HashMap<(u32, u32, usize), u64> {
    let mut histogram = HashMap::new();
    for u in 0..graph.node_count() {
        for (v, dist) in graph.bfs_distances(u).into_iter().enumerate() {
            if v <= u {
                continue;
            }
            if let Some(dist) = dist {
                let (a, b) = (graph.label(u), graph.label(v));
                let key = (a.min(b), a.max(b), dist);
                *histogram.entry(key).or_insert(0) += 1;
            }
        }
    }
    histogram
}

fn histogram_dot(a: &HashMap<(u32, u32, usize), u64>, b: &HashMap<(u32, u32, usize), u64>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter_map(|(key, &ca)| large.get(key).map(|&cb| ca as f64 * cb as f64))
        .sum()
}

/// The classic shortest-path baseline: dot products of triplet histograms.
pub fn sp_baseline_gram(dataset: &GraphDataset) -> Result<GramMatrix> {
    if !dataset.is_labeled() {
        return Err(Error::Precondition(
            "dataset has no node labels; assign surrogate labels first".into(),
        ));
    }
    let histograms: Vec<_> = dataset.graphs().par_iter().map(triplet_histogram).collect();
    let n = dataset.len();
    let mut values = vec![0.0f64; n * n];
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .collect();
    let dots: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| histogram_dot(&histograms[i], &histograms[j]))
        .collect();
    for (&(i, j), &dot) in pairs.iter().zip(&dots) {
        values[i * n + j] = dot;
        values[j * n + i] = dot;
    }
    let config = KernelConfig {
        variant: KernelVariant::SpBaseline,
        d: 0,
        k: 0,
        lambda: 1.0,
    };
    Ok(GramMatrix::from_values(n, values, config, dataset.name()))
}
