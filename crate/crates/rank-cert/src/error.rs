use matrix_core::MatrixError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertError {
    #[error("dimension mismatch: expected {expected}x{expected}, got {rows}x{cols}")]
    DimensionMismatch {
        expected: usize,
        rows: usize,
        cols: usize,
    },
    #[error("rank bound {requested} exceeds dimension {dim}")]
    RankBoundTooLarge { requested: usize, dim: usize },
    #[error("matrix has numerical rank {observed}, above the requested bound {requested}")]
    RankTooHigh { observed: usize, requested: usize },
    #[error("vector has {observed} entries above threshold, above the sparsity bound {requested}")]
    SparsityTooHigh { observed: usize, requested: usize },
    #[error("matrix is not positive semidefinite: eigenvalue {eigenvalue:.3e} is below -{tol:.3e}")]
    NotPsd { eigenvalue: f64, tol: f64 },
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}
