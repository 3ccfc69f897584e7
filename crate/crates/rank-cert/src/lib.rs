//! Certificates for matrix rank bounds.
//!
//! A rank certificate for `G ∈ ℝ^{m×n}` is a matrix `W` in the convex set
//!
//! ```text
//! Φ_{n,r} = { W symmetric, 0 ⪯ W ⪯ I, trace(W) = n − r }
//! ```
//!
//! with `G·W = 0` (or `W·G = 0` for the left-sided variant). Such a `W`
//! witnesses `rank(G) ≤ r`: Sylvester's inequality gives
//! `rank(G) + rank(W) ≤ n + rank(GW)`, and `trace(W) ≤ rank(W)` turns that
//! into `rank(G) ≤ n − trace(W) = r` once `GW = 0`. The converse holds as
//! well — when `rank(G) ≤ r` an orthogonal projector onto `n − r`
//! null-space directions is such a witness — so certificates are exact,
//! not a relaxation.
//!
//! This crate constructs certificates from the SVD, verifies candidate
//! certificates, specializes the machinery to the `ℓ0` pseudo-norm of
//! vectors (a diagonal matrix has rank equal to the number of nonzero
//! diagonal entries), and exposes the penalty-minimizing member of
//! `Φ_{n,r}` that the optimization crate uses as its inner step.

mod cert;
mod error;
mod phi;
mod psd;
mod sparse;

pub use cert::{
    left_certificate, min_penalty_certificate, right_certificate, verify_certificate, Certificate,
    Side, VerificationReport,
};
pub use error::CertError;
pub use phi::{phi_membership, MembershipReport, PhiParams};
pub use psd::{trace_certificate_psd, TraceEquivalenceReport};
pub use sparse::{l0_certificate, verify_l0, SparseCertificate};

/// Default relative tolerance for certificate residuals and Φ membership.
pub const DEFAULT_CERT_TOL: f64 = 1e-8;
