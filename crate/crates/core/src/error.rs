use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (max deviation {max_deviation:e})")]
    Asymmetric { max_deviation: f64 },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not positive definite (pivot {pivot:e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("subproblem hit the iteration cap ({iterations}) before reaching tolerance")]
    MaxSubIterations { iterations: usize },

    #[error("subproblem failed at outer iteration {iteration}: {source}")]
    Subproblem {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("every coordinate was thresholded to zero (over-regularized)")]
    AllThresholded,

    #[error("support of the vector is empty")]
    EmptySupport,

    #[error("update direction is zero")]
    ZeroDirection,

    #[error("every indicator vanished; the update is zero")]
    ZeroUpdate,

    #[error("gram-schmidt pivot {pivot:e} below tolerance at vector {index}")]
    RankCollapse { index: usize, pivot: f64 },

    #[error("only {found} informative pairs before the cross-covariance vanished")]
    EarlyStop { found: usize },

    #[error("no cardinality-{target} solution found on the regularization path")]
    UnreachableCardinality { target: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at row {row}, column {col}: {message}")]
    Parse {
        row: usize,
        col: usize,
        message: String,
    },

    #[error("sweep failed at grid index {index}: {source}")]
    Sweep {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed result file: {0}")]
    Json(#[from] serde_json::Error),
}
