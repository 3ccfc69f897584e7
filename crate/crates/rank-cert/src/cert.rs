use matrix_core::{rank_from_values, svd, sym_eig, Matrix, SpectralDecomposition};
use serde::{Deserialize, Serialize};

use crate::{phi_membership, CertError, MembershipReport, PhiParams, DEFAULT_CERT_TOL};

/// Which side of `G` the certificate annihilates: `G·W = 0` for `Right`,
/// `W·G = 0` for `Left`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Right,
    Left,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
        }
    }
}

/// A constructed rank certificate. `w` is always an orthogonal projector
/// (the strongest member of `Φ`), `residual` is `‖GW‖_F` or `‖WG‖_F`
/// depending on `side`, and `degenerate_cut` flags an ambiguous split of
/// the spectrum at the rank bound (the chosen null directions are then one
/// deterministic pick among equally good ones).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub w: Matrix,
    pub side: Side,
    pub r: usize,
    pub residual: f64,
    pub membership: MembershipReport,
    pub degenerate_cut: bool,
}

/// Outcome of checking a candidate certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub valid: bool,
    /// `round(n − trace(W))` (or `m − trace(W)` for a left certificate);
    /// when `valid`, `rank(G)` is at most this.
    pub certified_bound: usize,
    pub residual: f64,
    pub trace: f64,
    /// The inference chain the bound rests on, spelled out.
    pub justification: String,
}

/// Constructs `W ∈ Φ_{n,r}` with `G·W ≈ 0` from the right singular vectors
/// of `G` associated with its `n − r` smallest singular values; `W` is the
/// orthogonal projector onto their span. Fails with `RankTooHigh` when the
/// numerical rank of `G` at `rel_tol` exceeds `r`, since no exact
/// certificate exists then.
pub fn right_certificate(g: &Matrix, r: usize, rel_tol: f64) -> Result<Certificate, CertError> {
    certificate_impl(g, r, rel_tol, Side::Right)
}

/// Left-sided mirror of `right_certificate`: `W ∈ Φ_{m,r}` with `W·G ≈ 0`,
/// built from left singular vectors. Agrees with
/// `right_certificate(Gᵀ, r, rel_tol)` up to the deterministic sign
/// convention of the decomposition.
pub fn left_certificate(g: &Matrix, r: usize, rel_tol: f64) -> Result<Certificate, CertError> {
    certificate_impl(g, r, rel_tol, Side::Left)
}

fn certificate_impl(
    g: &Matrix,
    r: usize,
    rel_tol: f64,
    side: Side,
) -> Result<Certificate, CertError> {
    if !(rel_tol > 0.0) {
        return Err(CertError::NonPositiveTolerance(rel_tol));
    }
    let (m, n) = g.dims();
    let dim = match side {
        Side::Right => n,
        Side::Left => m,
    };
    if r > dim {
        return Err(CertError::RankBoundTooLarge { requested: r, dim });
    }
    let decomp = svd(g)?;
    let observed = rank_from_values(&decomp.values, rel_tol);
    if observed > r {
        return Err(CertError::RankTooHigh {
            observed,
            requested: r,
        });
    }

    let vectors = match side {
        Side::Right => &decomp.right_vectors,
        Side::Left => &decomp.left_vectors,
    };
    let w = if r == dim {
        // Φ_{dim,dim} contains only the zero matrix.
        Matrix::zeros(dim, dim)
    } else {
        let basis = vectors.column_range(r, dim);
        basis.matmul(&basis.transpose())
    };

    let residual = match side {
        Side::Right => g.matmul(&w).frobenius_norm(),
        Side::Left => w.matmul(g).frobenius_norm(),
    };
    let membership = phi_membership(&w, &PhiParams::new(dim, r, DEFAULT_CERT_TOL)?)?;
    Ok(Certificate {
        w,
        side,
        r,
        residual,
        membership,
        degenerate_cut: cut_is_degenerate(&decomp, r, dim, rel_tol),
    })
}

/// The split keeps directions `0..r` and drops `r..dim`; it is ambiguous
/// when the singular values on both sides of the cut coincide.
fn cut_is_degenerate(decomp: &SpectralDecomposition, r: usize, dim: usize, rel_tol: f64) -> bool {
    if r == 0 || r == dim {
        return false;
    }
    let value_at = |i: usize| decomp.values.get(i).copied().unwrap_or(0.0);
    let gap = value_at(r - 1) - value_at(r);
    gap <= rel_tol * decomp.max_value().max(1.0)
}

/// Checks a candidate `(G, W)` pair and derives the implied rank bound.
///
/// `valid` requires the shape conditions of `Φ` (symmetry, eigenvalues in
/// `[−tol, 1 + tol]`) and residual at most `tol · max(1, ‖G‖_F)`. The
/// bound follows from Sylvester's inequality plus `trace(W) ≤ rank(W)`:
/// `rank(G) + trace(W) ≤ n + rank(GW)`, and the residual condition stands
/// in for `rank(GW) = 0`.
pub fn verify_certificate(
    g: &Matrix,
    w: &Matrix,
    side: Side,
    tol: f64,
) -> Result<VerificationReport, CertError> {
    if !(tol > 0.0) {
        return Err(CertError::NonPositiveTolerance(tol));
    }
    let (m, n) = g.dims();
    let dim = match side {
        Side::Right => n,
        Side::Left => m,
    };
    if !w.is_square() || w.rows() != dim {
        return Err(CertError::DimensionMismatch {
            expected: dim,
            rows: w.rows(),
            cols: w.cols(),
        });
    }

    let symmetric = w.max_asymmetry() <= tol;
    let eig = sym_eig(&w.symmetrized())?;
    let min_eig = eig.values.last().copied().unwrap_or(0.0);
    let max_eig = eig.values.first().copied().unwrap_or(0.0);
    let shape_ok = symmetric && min_eig >= -tol && max_eig <= 1.0 + tol;

    let residual = match side {
        Side::Right => g.matmul(w).frobenius_norm(),
        Side::Left => w.matmul(g).frobenius_norm(),
    };
    let residual_ok = residual <= tol * g.frobenius_norm().max(1.0);

    let trace = w.trace();
    let valid = shape_ok && residual_ok;
    let bound = (dim as f64 - trace).round().clamp(0.0, dim as f64);
    let certified_bound = bound as usize;
    let product = match side {
        Side::Right => "GW",
        Side::Left => "WG",
    };
    let justification = format!(
        "Sylvester: rank(G) + rank(W) <= {dim} + rank({product}); with {product} = 0 \
         (residual {residual:.3e}) and trace(W) = {trace:.6} <= rank(W), \
         rank(G) <= {dim} - trace(W), so rank(G) <= {certified_bound}"
    );
    Ok(VerificationReport {
        valid,
        certified_bound,
        residual,
        trace,
        justification,
    })
}

/// Minimizer of `trace(GᵀG·W)` over `W ∈ Φ_{n,r}` and the attained value.
///
/// The minimum is the sum of the `n − r` smallest eigenvalues of `GᵀG`
/// (equivalently `Σ_{i>r} σ_i(G)²`), attained by the orthogonal projector
/// onto the corresponding eigenvectors. Since that `W` is a projector the
/// value also equals `‖GW‖_F²`. Used as the closed-form inner step of the
/// penalized solvers.
pub fn min_penalty_certificate(g: &Matrix, r: usize) -> Result<(Matrix, f64), CertError> {
    let n = g.cols();
    if r > n {
        return Err(CertError::RankBoundTooLarge { requested: r, dim: n });
    }
    let gram = g.transpose().matmul(g).symmetrized();
    let eig = sym_eig(&gram)?;
    if r == n {
        return Ok((Matrix::zeros(n, n), 0.0));
    }
    let basis = eig.right_vectors.column_range(r, n);
    let w = basis.matmul(&basis.transpose());
    let value = eig.values[r..].iter().sum();
    Ok((w, value))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-8;

    #[test]
    fn zero_matrix_certificate_is_identity() {
        let g = Matrix::zeros(2, 3);
        let cert = right_certificate(&g, 0, 1e-9).unwrap();
        assert!(cert.w.sub(&Matrix::identity(3)).max_abs() < 1e-12);
        assert_eq!(cert.residual, 0.0);
        assert!(cert.membership.member);
    }

    #[test]
    fn full_rank_bound_gives_zero_certificate() {
        let cert = right_certificate(&Matrix::identity(3), 3, 1e-9).unwrap();
        assert_eq!(cert.w, Matrix::zeros(3, 3));
        assert!(cert.membership.member);
    }

    #[test]
    fn rank_one_diagonal_certificate() {
        // Null space of diag(1, 0) is span(e₂), so W = e₂e₂ᵀ.
        let g = Matrix::diag(&[1.0, 0.0]);
        let cert = right_certificate(&g, 1, 1e-9).unwrap();
        assert!(cert.w.sub(&Matrix::diag(&[0.0, 1.0])).max_abs() < 1e-12);
        assert!(cert.membership.member);
        assert!(cert.residual <= 1e-12);
    }

    #[test]
    fn rank_too_high_reports_observed_rank() {
        let err = right_certificate(&Matrix::identity(3), 2, 1e-9).unwrap_err();
        assert_eq!(
            err,
            CertError::RankTooHigh {
                observed: 3,
                requested: 2
            }
        );
    }

    #[test]
    fn left_certificate_examples() {
        let g = Matrix::zeros(2, 3);
        let cert = left_certificate(&g, 0, 1e-9).unwrap();
        assert!(cert.w.sub(&Matrix::identity(2)).max_abs() < 1e-12);

        let g = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let cert = left_certificate(&g, 1, 1e-9).unwrap();
        assert!(cert.w.sub(&Matrix::diag(&[0.0, 1.0])).max_abs() < 1e-12);

        let cert = left_certificate(&Matrix::identity(2), 2, 1e-9).unwrap();
        assert_eq!(cert.w, Matrix::zeros(2, 2));
    }

    #[test]
    fn left_rank_bound_uses_row_count() {
        let g = Matrix::zeros(2, 3);
        assert!(right_certificate(&g, 3, 1e-9).is_ok());
        assert!(matches!(
            left_certificate(&g, 3, 1e-9),
            Err(CertError::RankBoundTooLarge { dim: 2, .. })
        ));
    }

    #[test]
    fn verify_zero_matrix_identity_certificate() {
        let report =
            verify_certificate(&Matrix::zeros(2, 3), &Matrix::identity(3), Side::Right, TOL)
                .unwrap();
        assert!(report.valid);
        assert_eq!(report.certified_bound, 0);
    }

    #[test]
    fn verify_diagonal_pair() {
        let g = Matrix::diag(&[1.0, 0.0]);
        let w = Matrix::diag(&[0.0, 1.0]);
        let report = verify_certificate(&g, &w, Side::Right, TOL).unwrap();
        assert!(report.valid);
        assert_eq!(report.certified_bound, 1);
        // Independent rank check: the bound is not vacuous.
        assert!(matrix_core::numerical_rank(&g, 1e-9) <= report.certified_bound);
    }

    #[test]
    fn verify_zero_certificate_gives_vacuous_bound() {
        let g = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let report = verify_certificate(&g, &Matrix::zeros(2, 2), Side::Right, TOL).unwrap();
        assert!(report.valid);
        assert_eq!(report.certified_bound, 2);
    }

    #[test]
    fn verify_rejects_shape_violations() {
        let g = Matrix::diag(&[1.0, 0.0]);
        // Eigenvalue 2 breaks 0 ⪯ W ⪯ I.
        let report = verify_certificate(&g, &Matrix::diag(&[0.0, 2.0]), Side::Right, TOL).unwrap();
        assert!(!report.valid);
        // Nonzero product breaks the residual condition.
        let report = verify_certificate(&g, &Matrix::identity(2), Side::Right, TOL).unwrap();
        assert!(!report.valid);
    }

    #[test]
    fn verify_dimension_mismatch() {
        let g = Matrix::zeros(2, 3);
        assert!(matches!(
            verify_certificate(&g, &Matrix::identity(2), Side::Right, TOL),
            Err(CertError::DimensionMismatch { expected: 3, .. })
        ));
        assert!(matches!(
            verify_certificate(&g, &Matrix::identity(3), Side::Left, TOL),
            Err(CertError::DimensionMismatch { expected: 2, .. })
        ));
    }

    #[test]
    fn min_penalty_on_diagonal() {
        // Eigenvalues of GᵀG are 9 and 1; dropping to rank 1 costs 1.
        let (w, value) = min_penalty_certificate(&Matrix::diag(&[3.0, 1.0]), 1).unwrap();
        assert!((value - 1.0).abs() < 1e-12);
        assert!(w.sub(&Matrix::diag(&[0.0, 1.0])).max_abs() < 1e-12);
    }

    #[test]
    fn min_penalty_full_rank_is_free() {
        let g = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let (w, value) = min_penalty_certificate(&g, 2).unwrap();
        assert_eq!(w, Matrix::zeros(2, 2));
        assert_eq!(value, 0.0);
    }

    #[test]
    fn min_penalty_value_equals_residual_squared() {
        let g = Matrix::from_rows(vec![vec![1.0, 2.0, 0.0], vec![0.5, -1.0, 2.0]]).unwrap();
        for r in 0..=3 {
            let (w, value) = min_penalty_certificate(&g, r).unwrap();
            let resid = g.matmul(&w).frobenius_norm();
            assert!((value - resid * resid).abs() < 1e-10, "r = {r}");
        }
    }

    #[test]
    fn degenerate_cut_is_flagged() {
        // Identity: every split of equal singular values is ambiguous.
        let cert = right_certificate(&Matrix::zeros(2, 2), 1, 1e-9).unwrap();
        assert!(cert.degenerate_cut);
        // Clear gap: not ambiguous.
        let cert = right_certificate(&Matrix::diag(&[5.0, 0.0]), 1, 1e-9).unwrap();
        assert!(!cert.degenerate_cut);
    }
}
