use matrix_core::{pinv, Matrix};
use rank_cert::{verify_l0, DEFAULT_CERT_TOL};

use crate::problem::{SolveReport, SolveStatus, SolverConfig};
use crate::OptError;

/// Minimizes `‖Ax − b‖²` subject to `‖x‖₀ ≤ k`, the diagonal
/// specialization of the rank-constrained solver: `G(x) = diag(x)` and
/// `W = diag(w)` with `w_i ∈ {0, 1}`, `Σw_i = n − k`.
///
/// Each round is a `w`-step putting weight on the `n − k` coordinates with
/// the smallest `λ·x_i²` (equivalently, selecting the top-`k` magnitudes as
/// the support, ties to the lowest index) followed by an `x`-step solving
/// least squares exactly on the selected support. The penalized objective
/// is monotone per round at fixed `λ`, and the run converges when the
/// support stops moving. The report's `theta` is `x` and `w` is `diag(w)`.
pub fn solve_sparse_ls(
    a: &Matrix,
    b: &[f64],
    k: usize,
    config: &SolverConfig,
) -> Result<SolveReport, OptError> {
    config.validate()?;
    let (m, n) = a.dims();
    if k > n {
        return Err(OptError::SparsityBoundTooLarge {
            requested: k,
            len: n,
        });
    }
    if b.len() != m {
        return Err(OptError::RhsDimensionMismatch {
            expected: m,
            got: b.len(),
        });
    }

    let mut x = match &config.theta_init {
        Some(init) => {
            if init.len() != n {
                return Err(OptError::InitDimensionMismatch {
                    expected: n,
                    got: init.len(),
                });
            }
            init.clone()
        }
        None => pinv(a)?.matvec(b),
    };

    let lambda = config.penalty_init;
    let mut w = select_weights(&x, k, lambda);
    let mut objective_trajectory = Vec::new();
    let mut residual_trajectory = Vec::new();
    let mut penalty_trajectory = Vec::new();
    let mut status = SolveStatus::MaxIters;
    let mut iterations = 0;

    for iter in 1..=config.max_outer_iters {
        iterations = iter;
        let support: Vec<usize> = (0..n).filter(|&i| w[i] == 0.0).collect();
        x = restricted_least_squares(a, b, &support)?;

        let ls = residual_norm_squared(a, b, &x);
        let penalty: f64 = x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| wi * xi * xi)
            .sum::<f64>();
        objective_trajectory.push(ls + lambda * penalty);
        let diag_residual = x
            .iter()
            .zip(&w)
            .map(|(xi, wi)| (xi * wi) * (xi * wi))
            .sum::<f64>()
            .sqrt();
        residual_trajectory.push(diag_residual);
        penalty_trajectory.push(lambda);

        let next_w = select_weights(&x, k, lambda);
        if next_w == w {
            status = SolveStatus::Converged;
            break;
        }
        w = next_w;
    }

    let final_objective = residual_norm_squared(a, b, &x);
    let final_residual = x
        .iter()
        .zip(&w)
        .map(|(xi, wi)| (xi * wi) * (xi * wi))
        .sum::<f64>()
        .sqrt();
    let certified =
        status == SolveStatus::Converged && verify_l0(&x, &w, k, DEFAULT_CERT_TOL);

    Ok(SolveReport {
        theta: x,
        w: Matrix::diag(&w),
        objective_trajectory,
        residual_trajectory,
        penalty_trajectory,
        final_objective,
        final_residual,
        certified,
        iterations,
        status,
        rank_estimate: None,
    })
}

/// `w_i = 1` on the `n − k` smallest `λ·x_i²` (ties to the lowest index
/// among the smaller magnitudes), zero on the top-`k` support.
fn select_weights(x: &[f64], k: usize, lambda: f64) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let pi = lambda * x[i] * x[i];
        let pj = lambda * x[j] * x[j];
        pj.partial_cmp(&pi).expect("finite entries").then(i.cmp(&j))
    });
    let mut w = vec![1.0; n];
    for &i in order.iter().take(k) {
        w[i] = 0.0;
    }
    w
}

/// Minimum-norm least squares over the support columns, zero elsewhere.
fn restricted_least_squares(
    a: &Matrix,
    b: &[f64],
    support: &[usize],
) -> Result<Vec<f64>, OptError> {
    let n = a.cols();
    let mut x = vec![0.0; n];
    if support.is_empty() {
        return Ok(x);
    }
    let a_support = Matrix::from_fn(a.rows(), support.len(), |i, j| a.get(i, support[j]));
    let solution = pinv(&a_support)?.matvec(b);
    for (slot, value) in support.iter().zip(solution) {
        x[*slot] = value;
    }
    Ok(x)
}

fn residual_norm_squared(a: &Matrix, b: &[f64], x: &[f64]) -> f64 {
    a.matvec(x)
        .iter()
        .zip(b)
        .map(|(ax, bi)| (ax - bi) * (ax - bi))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_design_is_hard_thresholding() {
        let a = Matrix::identity(5);
        let b = vec![3.0, -1.0, 0.5, 2.0, -0.25];
        let report = solve_sparse_ls(&a, &b, 2, &SolverConfig::default()).unwrap();
        assert_eq!(report.status, SolveStatus::Converged);
        assert!(report.certified);
        // Top-2 magnitudes of b are entries 0 and 3.
        assert_eq!(report.theta, vec![3.0, 0.0, 0.0, 2.0, 0.0]);
    }

    #[test]
    fn full_budget_is_plain_least_squares() {
        let a = Matrix::from_rows(vec![
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let b = vec![1.0, 2.0, 1.0];
        let report = solve_sparse_ls(&a, &b, 2, &SolverConfig::default()).unwrap();
        assert!(report.certified);
        assert_eq!(report.w, Matrix::zeros(2, 2));
        let direct = pinv(&a).unwrap().matvec(&b);
        for (got, want) in report.theta.iter().zip(&direct) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_budget_forces_the_zero_vector() {
        let a = Matrix::identity(3);
        let b = vec![1.0, 2.0, 3.0];
        let report = solve_sparse_ls(&a, &b, 0, &SolverConfig::default()).unwrap();
        assert_eq!(report.theta, vec![0.0; 3]);
        assert!(report.certified);
        assert!((report.final_objective - 14.0).abs() < 1e-12);
    }

    #[test]
    fn budget_above_length_is_rejected() {
        let a = Matrix::identity(2);
        assert!(matches!(
            solve_sparse_ls(&a, &[1.0, 1.0], 3, &SolverConfig::default()),
            Err(OptError::SparsityBoundTooLarge { .. })
        ));
    }

    #[test]
    fn monotone_objective_per_round() {
        let a = Matrix::from_rows(vec![
            vec![1.0, 0.4, -0.2, 0.9],
            vec![0.1, 1.0, 0.3, -0.5],
            vec![-0.3, 0.2, 1.0, 0.6],
            vec![0.7, -0.6, 0.2, 1.0],
            vec![0.2, 0.8, -0.4, 0.3],
        ])
        .unwrap();
        let b = vec![1.0, -2.0, 0.5, 0.25, 1.5];
        let report = solve_sparse_ls(&a, &b, 2, &SolverConfig::default()).unwrap();
        for t in 1..report.objective_trajectory.len() {
            assert!(
                report.objective_trajectory[t] <= report.objective_trajectory[t - 1] + 1e-10
            );
        }
        assert!(report.certified);
    }
}
