use thiserror::Error;

/// Errors produced by the spectral reasoning pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("node index {index} out of range for graph with {n} nodes")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("invalid edge weight {weight} on ({i}, {j}): {reason}")]
    InvalidWeight {
        i: usize,
        j: usize,
        weight: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("lambda_max mismatch: filter was fitted for {filter}, operator uses {operator}")]
    LambdaMaxMismatch { filter: f64, operator: f64 },

    #[error("oracle unavailable at this size: n = {n} exceeds cap {cap}")]
    OracleUnavailable { n: usize, cap: usize },

    #[error("signal domain mismatch: expected {expected:?}, got {got:?}")]
    DomainMismatch {
        expected: crate::signal::Domain,
        got: crate::signal::Domain,
    },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("solver did not converge after {iters} iterations (relative residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("band {0} contains no eigenvalues")]
    EmptyBand(usize),

    #[error("invalid band partition: {0}")]
    InvalidPartition(String),

    #[error("training diverged at epoch {0}")]
    Diverged(usize),

    #[error("task generation failed: {0}")]
    Generation(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
