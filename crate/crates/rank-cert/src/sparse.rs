use serde::{Deserialize, Serialize};

use crate::{CertError, DEFAULT_CERT_TOL};

/// Certificate that a vector has at most `r` nonzero entries: a weight
/// vector `w` with `0 ≤ w_i ≤ 1`, `Σ w_i = n − r`, and `x_i·w_i = 0`.
/// This is the diagonal specialization of the matrix certificate, with
/// `diag(w)` playing the role of `W` for `G = diag(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseCertificate {
    pub w: Vec<f64>,
    pub r: usize,
    /// `|x_i · w_i|` per coordinate.
    pub residuals: Vec<f64>,
}

/// Entries with magnitude above `DEFAULT_CERT_TOL · max(1, ‖x‖_∞)` count
/// as nonzero.
pub fn support_threshold(x: &[f64]) -> f64 {
    let max = x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    DEFAULT_CERT_TOL * max.max(1.0)
}

/// Builds the binary certificate for `‖x‖₀ ≤ r`: `w_i = 0` on the `r`
/// largest-magnitude positions (ties broken by lowest index), `w_i = 1`
/// elsewhere. Fractional weights are admissible members too; the binary
/// pattern is returned because it maximizes slack in every condition.
pub fn l0_certificate(x: &[f64], r: usize) -> Result<SparseCertificate, CertError> {
    let n = x.len();
    assert!(x.iter().all(|v| v.is_finite()), "entries must be finite");
    if r > n {
        return Err(CertError::RankBoundTooLarge { requested: r, dim: n });
    }
    let threshold = support_threshold(x);
    let observed = x.iter().filter(|v| v.abs() > threshold).count();
    if observed > r {
        return Err(CertError::SparsityTooHigh {
            observed,
            requested: r,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        x[j].abs()
            .partial_cmp(&x[i].abs())
            .expect("finite entries")
            .then(i.cmp(&j))
    });
    let mut w = vec![1.0; n];
    for &i in order.iter().take(r) {
        w[i] = 0.0;
    }
    let residuals = x.iter().zip(&w).map(|(xi, wi)| (xi * wi).abs()).collect();
    Ok(SparseCertificate { w, r, residuals })
}

/// Checks a candidate weight vector against `‖x‖₀ ≤ r`: every `w_i` in
/// `[−tol, 1 + tol]`, `|Σ w_i − (n − r)| ≤ tol·n`, and every product
/// `|x_i·w_i| ≤ tol · max(1, ‖x‖_∞)`. Mismatched lengths fail the check.
pub fn verify_l0(x: &[f64], w: &[f64], r: usize, tol: f64) -> bool {
    if x.len() != w.len() || r > x.len() {
        return false;
    }
    let n = x.len();
    let scale = x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(1.0);
    let bounds_ok = w.iter().all(|&wi| wi >= -tol && wi <= 1.0 + tol);
    let sum: f64 = w.iter().sum();
    let sum_ok = (sum - (n - r) as f64).abs() <= tol * n as f64;
    let products_ok = x.iter().zip(w).all(|(xi, wi)| (xi * wi).abs() <= tol * scale);
    bounds_ok && sum_ok && products_ok
}
