use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("cover mismatch in tree {tree} at node {node}: children sum to {children}, node has {parent}")]
    CoverMismatch {
        tree: usize,
        node: usize,
        parent: f64,
        children: f64,
    },

    #[error("tree {tree} node {node} references child {child} but the tree has {len} nodes")]
    DanglingChild {
        tree: usize,
        node: usize,
        child: usize,
        len: usize,
    },

    #[error("feature index {feature} out of range for {feature_count} features")]
    FeatureOutOfRange {
        feature: usize,
        feature_count: usize,
    },

    #[error("no trees in model")]
    NoTrees,

    #[error("unsupported XGBoost dump: {0}")]
    UnsupportedDump(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("input has {got} features, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{what} has {count} entries, limit is {limit}")]
    GuardExceeded {
        what: &'static str,
        count: usize,
        limit: usize,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("nothing to render")]
    EmptyInput,
}
