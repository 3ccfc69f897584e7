//! Dense real linear algebra sized for desk-scale rank computations.
//!
//! The crate provides exactly the primitives the certificate and solver
//! crates need: full SVD with completed orthonormal bases, symmetric
//! eigendecomposition, the Moore–Penrose pseudoinverse and a numerical
//! rank. Storage is row-major `f64`; no sparsity, no complex scalars.

mod decomp;
mod matrix;

pub use decomp::{numerical_rank, pinv, rank_from_values, svd, sym_eig, SpectralDecomposition};
pub use matrix::{Matrix, MatrixError};

/// Relative threshold below which a singular value counts as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Allowed relative reconstruction error for a decomposition.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// Symmetry slack factor: a matrix is accepted as symmetric when the largest
/// asymmetry is at most this times `max(1, ‖A‖_F)`.
pub const SYMMETRY_TOL_FACTOR: f64 = 1e-10;
