//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node index {index} out of range for graph with {n} nodes")]
    NodeIndexOutOfRange { index: usize, n: usize },

    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    DimensionMismatch {
        expected: String,
        got: String,
        context: &'static str,
    },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("linear system is singular or not positive definite")]
    SingularSystem,

    #[error("dense kernel guard exceeded: n = {n} > limit {limit}")]
    DenseGuardExceeded { n: usize, limit: usize },

    #[error("attention matrix is not row-stochastic: row {row} sums to {sum}")]
    NotRowStochastic { row: usize, sum: f64 },

    #[error("attention entry at ({row}, {col}) lies outside the closed 1-hop neighborhood")]
    AttentionSupport { row: usize, col: usize },

    #[error("combination weights sum to {sum}, expected 1")]
    WeightsNotNormalized { sum: f64 },

    #[error("walk kernel is not a proper distribution at node {node}: column mass {mass}")]
    ImproperDistribution { node: usize, mass: f64 },

    #[error("edge deletion infeasible: requested {requested}, achieved {achieved} without disconnecting")]
    EdgeDeletionInfeasible { requested: usize, achieved: usize },

    #[error("training diverged (non-finite loss) at epoch {epoch}")]
    TrainingDiverged { epoch: usize },

    #[error("label {label} at node {node} out of range for {classes} classes")]
    LabelOutOfRange {
        node: usize,
        label: usize,
        classes: usize,
    },

    #[error("split masks overlap at node {node}")]
    OverlappingMasks { node: usize },

    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
