use thiserror::Error;

/// Errors raised across the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("constraint index {index} out of range ({len} constraints)")]
    ConstraintIndex { index: usize, len: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("matrix is not symmetric (|a_ij - a_ji| = {deviation:e} at ({row}, {col}))")]
    NotSymmetric { row: usize, col: usize, deviation: f64 },

    #[error("enumeration of {size} points exceeds the limit of {limit}")]
    EnumerationTooLarge { size: f64, limit: usize },

    #[error("interaction graph is not bipartite")]
    NotBipartite,

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
