use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by dataset loading, feature extraction, transport
/// solving, and the evaluation harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A mandatory dataset file is absent.
    #[error("missing dataset file: {0}")]
    MissingFile(PathBuf),

    /// A token that should be an integer could not be parsed.
    #[error("{file}:{line}: expected an integer, found {token:?}")]
    Parse {
        file: String,
        line: usize,
        token: String,
    },

    /// Structurally inconsistent input data (e.g. an edge crossing graphs).
    #[error("{file}:{line}: {message}")]
    Integrity {
        file: String,
        line: usize,
        message: String,
    },

    /// A node index outside the graph.
    #[error("node index {index} out of range for graph with {count} nodes")]
    NodeIndex { index: usize, count: usize },

    /// Operands do not share a column space or have mismatched sizes.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Wrong number of per-scale blocks handed to a concatenation.
    #[error("arity mismatch: {0}")]
    Arity(String),

    /// An operation's precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Invalid caller-supplied values (non-finite costs, bad grids, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A bug: an internal consistency guarantee failed.
    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user input rather than library bugs.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
