use matrix_core::{sym_eig, Matrix};
use serde::{Deserialize, Serialize};

use crate::CertError;

/// Parameters of the set `Φ_{n,r}`: symmetric `n×n` matrices with
/// eigenvalues in `[0, 1]` and trace `n − r`, tested with slack `tol`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiParams {
    pub n: usize,
    pub r: usize,
    pub tol: f64,
}

impl PhiParams {
    pub fn new(n: usize, r: usize, tol: f64) -> Result<Self, CertError> {
        if r > n {
            return Err(CertError::RankBoundTooLarge { requested: r, dim: n });
        }
        if !(tol > 0.0) {
            return Err(CertError::NonPositiveTolerance(tol));
        }
        Ok(Self { n, r, tol })
    }

    /// The trace every member must have.
    pub fn target_trace(&self) -> f64 {
        (self.n - self.r) as f64
    }
}

/// Diagnostics from a Φ membership test. `min_eigenvalue`, `max_eigenvalue`
/// and `trace_deviation` are always populated, member or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub member: bool,
    pub symmetric: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub trace: f64,
    pub trace_deviation: f64,
}

/// Tests `W ∈ Φ_{n,r}` within `params.tol`.
///
/// Membership requires symmetry (largest asymmetry at most `tol`),
/// eigenvalues in `[−tol, 1 + tol]`, and `|trace(W) − (n − r)| ≤ tol·n`.
pub fn phi_membership(w: &Matrix, params: &PhiParams) -> Result<MembershipReport, CertError> {
    if !w.is_square() || w.rows() != params.n {
        return Err(CertError::DimensionMismatch {
            expected: params.n,
            rows: w.rows(),
            cols: w.cols(),
        });
    }
    let symmetric = w.max_asymmetry() <= params.tol;
    // Eigenvalues of the symmetric part; for symmetric-within-tol W the
    // difference is within the slack already granted.
    let eig = sym_eig(&w.symmetrized())?;
    let max_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0);
    let trace = w.trace();
    let trace_deviation = (trace - params.target_trace()).abs();
    let member = symmetric
        && min_eigenvalue >= -params.tol
        && max_eigenvalue <= 1.0 + params.tol
        && trace_deviation <= params.tol * params.n as f64;
    Ok(MembershipReport {
        member,
        symmetric,
        min_eigenvalue,
        max_eigenvalue,
        trace,
        trace_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-8;

    #[test]
    fn identity_is_member_at_rank_zero() {
        let params = PhiParams::new(3, 0, TOL).unwrap();
        let report = phi_membership(&Matrix::identity(3), &params).unwrap();
        assert!(report.member);
        assert_eq!(report.trace, 3.0);
    }

    #[test]
    fn zero_matrix_is_the_member_at_full_rank() {
        let params = PhiParams::new(3, 3, TOL).unwrap();
        let report = phi_membership(&Matrix::zeros(3, 3), &params).unwrap();
        assert!(report.member);
        assert_eq!(report.trace, 0.0);
    }

    #[test]
    fn eigenvalue_above_one_is_rejected() {
        let params = PhiParams::new(2, 0, TOL).unwrap();
        let report = phi_membership(&Matrix::diag(&[2.0, 0.0]), &params).unwrap();
        assert!(!report.member);
        assert_eq!(report.max_eigenvalue, 2.0);
    }

    #[test]
    fn trace_mismatch_is_rejected_with_diagnostics() {
        let params = PhiParams::new(2, 0, TOL).unwrap();
        // Eigenvalues fine, trace 1 instead of 2.
        let report = phi_membership(&Matrix::diag(&[1.0, 0.0]), &params).unwrap();
        assert!(!report.member);
        assert_eq!(report.trace_deviation, 1.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let params = PhiParams::new(3, 1, TOL).unwrap();
        assert!(matches!(
            phi_membership(&Matrix::identity(2), &params),
            Err(CertError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn params_validate_rank_bound() {
        assert!(matches!(
            PhiParams::new(2, 3, TOL),
            Err(CertError::RankBoundTooLarge { .. })
        ));
        assert!(matches!(
            PhiParams::new(2, 1, 0.0),
            Err(CertError::NonPositiveTolerance(_))
        ));
    }
}
