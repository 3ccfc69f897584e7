use matrix_core::{sym_eig, Matrix, MatrixError};
use serde::{Deserialize, Serialize};

use crate::CertError;

/// For symmetric PSD `G` and `W`, `trace(WG) = 0` exactly when `WG = 0`.
/// This report carries both sides of that equivalence plus a second,
/// factor-based route to the trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEquivalenceReport {
    pub trace_value: f64,
    pub product_norm: f64,
    /// Whether `trace ≤ tol` and `norm ≤ tol` gave the same verdict.
    pub agree: bool,
    /// `‖PᵀQ‖_F²` for factors with `G = PPᵀ`, `W = QQᵀ`.
    pub factored_value: f64,
    /// `|trace_value − factored_value|`.
    pub discrepancy: f64,
}

/// Evaluates the PSD trace equivalence for a pair `(G, W)`.
///
/// Both inputs must be symmetric PSD within `tol`; eigenvalues in
/// `[−tol, 0)` count as zero, anything lower is a contract violation
/// naming the offending eigenvalue. The factored route writes `G = PPᵀ`
/// and `W = QQᵀ` with square roots from the eigendecomposition, under
/// which `trace(WG) = ‖PᵀQ‖_F²`.
pub fn trace_certificate_psd(
    g: &Matrix,
    w: &Matrix,
    tol: f64,
) -> Result<TraceEquivalenceReport, CertError> {
    if !(tol > 0.0) {
        return Err(CertError::NonPositiveTolerance(tol));
    }
    if !g.is_square() {
        return Err(CertError::Matrix(MatrixError::NotSquare {
            rows: g.rows(),
            cols: g.cols(),
        }));
    }
    if !w.is_square() || w.rows() != g.rows() {
        return Err(CertError::DimensionMismatch {
            expected: g.rows(),
            rows: w.rows(),
            cols: w.cols(),
        });
    }

    let p = psd_root(g, tol)?;
    let q = psd_root(w, tol)?;

    let product = w.matmul(g);
    let trace_value = product.trace();
    let product_norm = product.frobenius_norm();
    let factored_value = {
        let ptq = p.transpose().matmul(&q);
        let f = ptq.frobenius_norm();
        f * f
    };
    let agree = (trace_value <= tol) == (product_norm <= tol);
    Ok(TraceEquivalenceReport {
        trace_value,
        product_norm,
        agree,
        factored_value,
        discrepancy: (trace_value - factored_value).abs(),
    })
}

/// Symmetric square root with clamping of slightly negative eigenvalues.
fn psd_root(a: &Matrix, tol: f64) -> Result<Matrix, CertError> {
    let asym = a.max_asymmetry();
    if asym > tol {
        return Err(CertError::Matrix(MatrixError::NotSymmetric {
            asymmetry: asym,
            tol,
        }));
    }
    let eig = sym_eig(&a.symmetrized())?;
    if let Some(&lambda) = eig.values.last() {
        if lambda < -tol {
            return Err(CertError::NotPsd {
                eigenvalue: lambda,
                tol,
            });
        }
    }
    let n = a.rows();
    let q = &eig.right_vectors;
    let roots: Vec<f64> = eig.values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok(Matrix::from_fn(n, n, |i, j| q.get(i, j) * roots[j]))
}
