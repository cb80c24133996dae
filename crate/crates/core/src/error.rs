use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph is disconnected ({components} components)")]
    DisconnectedGraph { components: usize },

    #[error("node index {index} out of range for {n} nodes")]
    InvalidIndex { index: usize, n: usize },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid labels: {0}")]
    InvalidLabels(String),

    #[error("invalid split: {0}")]
    InvalidSplit(String),

    #[error("random walk exceeded the step cap of {cap} steps")]
    StepCapExceeded { cap: u64 },

    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency tables cover different edge sets")]
    EdgeSetMismatch,

    #[error("invalid start node {start} for a tree on {n} nodes")]
    InvalidStart { start: usize, n: usize },

    #[error("graph has {n} nodes, above the dense cap of {cap}")]
    SizeCapExceeded { n: usize, cap: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("no resistance available for edge ({0}, {1})")]
    MissingEdgeResistance(usize, usize),

    #[error("not a permutation of 0..{n}")]
    InvalidPermutation { n: usize },

    #[error("invalid layer dims: {0}")]
    InvalidDims(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite activation in layer {layer}")]
    NonFiniteActivation { layer: usize },

    #[error("subset is empty")]
    EmptySubset,

    #[error("forward cache is stale or was not produced in training mode")]
    StaleCache,

    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("class {class} has {available} members, {requested} requested")]
    ClassTooSmall {
        class: usize,
        available: usize,
        requested: usize,
    },

    #[error("could not generate a connected graph after {attempts} attempts")]
    CouldNotConnect { attempts: usize },

    #[error("missing file {0}")]
    MissingFile(PathBuf),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("bad checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
