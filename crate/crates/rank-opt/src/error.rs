use matrix_core::MatrixError;
use rank_cert::CertError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptError {
    #[error("coefficient matrix {index} is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    MapDimensionMismatch {
        index: usize,
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("objective dimension {got} does not match parameter count {expected}")]
    ObjectiveDimensionMismatch { expected: usize, got: usize },
    #[error("objective matrix is not positive semidefinite: eigenvalue {0:.3e}")]
    ObjectiveNotPsd(f64),
    #[error("rank bound {requested} exceeds column count {cols}")]
    RankBoundTooLarge { requested: usize, cols: usize },
    #[error("sparsity bound {requested} exceeds vector length {len}")]
    SparsityBoundTooLarge { requested: usize, len: usize },
    #[error("invalid bounds at coordinate {index}: lo {lo} > hi {hi}")]
    InvalidBounds { index: usize, lo: f64, hi: f64 },
    #[error("bounds length {got} does not match parameter count {expected}")]
    BoundsDimensionMismatch { expected: usize, got: usize },
    #[error("initial point length {got} does not match parameter count {expected}")]
    InitDimensionMismatch { expected: usize, got: usize },
    #[error("right-hand side length {got} does not match row count {expected}")]
    RhsDimensionMismatch { expected: usize, got: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
