use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("rejection sampling gave up after {attempts} attempts ({found} of {needed} pairs found)")]
    RejectionLimit {
        attempts: usize,
        found: usize,
        needed: usize,
    },

    #[error("cannot draw {requested} distinct nodes: only {available} have positive probability")]
    NotEnoughNodes { requested: usize, available: usize },

    #[error("all importance values are zero")]
    ZeroImportance,

    #[error("enumeration oracle limited to n <= {max_n} and n_s <= {max_ns} (got n = {n}, n_s = {ns})")]
    TooLargeForEnumeration {
        n: usize,
        ns: usize,
        max_n: usize,
        max_ns: usize,
    },

    #[error("pair set is empty")]
    EmptyPairSet,

    #[error("pair set has no positive pairs, automatic positive weight is undefined")]
    NoPositives,

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
