//! Graph kernels built from multi-scale shortest-path feature maps compared
//! with the exact 1-Wasserstein distance, plus the supporting pipeline:
//! dataset ingestion, truncated-BFS path extraction, canonical tree
//! labeling, sparse feature maps, Gram assembly, and an SVM
//! cross-validation harness.

pub mod error;
pub mod features;
pub mod fixtures;
pub mod graph;
pub mod kernels;
pub mod labeling;
pub mod linalg;
pub mod paths;
pub mod svm;
pub mod tudataset;
pub mod wasserstein;

pub mod cv;

pub use error::{Error, Result};
pub use graph::{
    dataset_statistics, validate_graph, Graph, GraphDataset, SpLengthMode, StatsReport,
    SurrogateMode,
};
pub use kernels::{build_gram, GramMatrix, KernelConfig, KernelVariant};
