//! Quadratic subproblem machinery shared by the solvers.

use matrix_core::{pinv, rank_from_values, svd, sym_eig, Matrix};

use crate::problem::{AffineMatrixMap, QuadraticObjective};

/// Expands `‖G(θ)·W‖_F²` into `θᵀPθ + 2qᵀθ + c₀` and returns `(P, q, c₀)`.
pub(crate) fn penalty_terms(map: &AffineMatrixMap, w: &Matrix) -> (Matrix, Vec<f64>, f64) {
    let products: Vec<Matrix> = map.coefficients().iter().map(|g| g.matmul(w)).collect();
    let base_product = map.base().matmul(w);
    let p = map.arity();
    let q: Vec<f64> = products.iter().map(|mk| base_product.fro_dot(mk)).collect();
    let c0 = base_product.fro_dot(&base_product);
    if p == 0 {
        return (Matrix::zeros(1, 1), q, c0);
    }
    let gram = Matrix::from_fn(p, p, |k, l| products[k].fro_dot(&products[l]));
    (gram, q, c0)
}

pub(crate) fn quad_value(a: &Matrix, b: &[f64], x: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let quad: f64 = x.iter().zip(&ax).map(|(xi, ai)| xi * ai).sum();
    let lin: f64 = x.iter().zip(b).map(|(xi, bi)| xi * bi).sum();
    0.5 * quad + lin
}

pub(crate) fn clamp_to_bounds(theta: &[f64], bounds: Option<&[(f64, f64)]>) -> Vec<f64> {
    match bounds {
        None => theta.to_vec(),
        Some(b) => theta
            .iter()
            .zip(b)
            .map(|(&t, &(lo, hi))| t.clamp(lo, hi))
            .collect(),
    }
}

/// Minimizes `½xᵀAx + bᵀx` for symmetric PSD `A`.
///
/// Unboxed problems go through the pseudoinverse (minimum-norm solution of
/// the normal equations); boxed ones through projected coordinate descent
/// from the warm start. Either way the returned point is never worse than
/// the warm start, which is what gives the outer loops their monotonicity.
pub(crate) fn minimize_quadratic(
    a: &Matrix,
    b: &[f64],
    bounds: Option<&[(f64, f64)]>,
    warm: &[f64],
) -> Vec<f64> {
    match bounds {
        None => {
            let solution = spectral_solve(a, b);
            if quad_value(a, b, &solution) <= quad_value(a, b, warm) {
                solution
            } else {
                warm.to_vec()
            }
        }
        Some(bounds) => coordinate_descent(a, b, bounds, warm),
    }
}

/// Minimum-norm solution of `A·x = −b` for symmetric PSD `A` through its
/// eigendecomposition. The nullity cutoff is near machine precision: the
/// penalty weight spreads the eigenvalues of `A = H + 2λP` over many
/// orders of magnitude, and the small eigenvalues are exactly the
/// directions the objective lives in, so a rank-detection style cutoff
/// would discard them.
fn spectral_solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let eig = sym_eig(&a.symmetrized()).expect("eigendecomposition convergence");
    let cutoff = 1e-14 * eig.max_value().abs().max(f64::MIN_POSITIVE);
    let p = b.len();
    let q = &eig.right_vectors;
    let mut x = vec![0.0; p];
    for (k, &value) in eig.values.iter().enumerate() {
        if value <= cutoff {
            continue;
        }
        let coeff: f64 = (0..p).map(|i| q.get(i, k) * b[i]).sum::<f64>() / value;
        for i in 0..p {
            x[i] -= coeff * q.get(i, k);
        }
    }
    x
}

fn coordinate_descent(a: &Matrix, b: &[f64], bounds: &[(f64, f64)], warm: &[f64]) -> Vec<f64> {
    let p = b.len();
    let mut x = clamp_to_bounds(warm, Some(bounds));
    for _ in 0..500 {
        let mut max_change = 0.0_f64;
        for k in 0..p {
            let akk = a.get(k, k);
            let grad: f64 = a.row(k).iter().zip(&x).map(|(aj, xj)| aj * xj).sum::<f64>() + b[k];
            let (lo, hi) = bounds[k];
            let old = x[k];
            let new = if akk > 0.0 {
                (old - grad / akk).clamp(lo, hi)
            } else if grad > 0.0 && lo.is_finite() {
                lo
            } else if grad < 0.0 && hi.is_finite() {
                hi
            } else {
                old
            };
            x[k] = new;
            max_change = max_change.max((new - old).abs());
        }
        let scale = x.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        if max_change <= 1e-14 * scale {
            break;
        }
    }
    x
}

/// Exact feasibility restoration: minimizes `f` over `{θ : G(θ)·W = 0}`
/// (an affine set, since `G` is affine in `θ`) via a null-space reduction.
///
/// Returns `None` when the constraint set is empty for this `W`, or when
/// the restored point would leave the box; callers then keep the penalty
/// iterate.
pub(crate) fn restore_feasibility(
    map: &AffineMatrixMap,
    objective: &QuadraticObjective,
    bounds: Option<&[(f64, f64)]>,
    w: &Matrix,
) -> Option<Vec<f64>> {
    let p = map.arity();
    if p == 0 {
        return None;
    }
    let (m, _) = map.dims();
    let n_w = w.cols();
    let products: Vec<Matrix> = map.coefficients().iter().map(|g| g.matmul(w)).collect();
    let base_product = map.base().matmul(w);

    // Stack G(θ)W = 0 entrywise: C·θ = rhs.
    let rows = m * n_w;
    let constraint = Matrix::from_fn(rows, p, |row, k| products[k].get(row / n_w, row % n_w));
    let rhs: Vec<f64> = (0..rows)
        .map(|row| -base_product.get(row / n_w, row % n_w))
        .collect();

    let decomp = svd(&constraint).ok()?;
    let particular = pinv(&constraint).ok()?.matvec(&rhs);
    let achieved = constraint.matvec(&particular);
    let rhs_scale = rhs.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
    let infeasibility = achieved
        .iter()
        .zip(&rhs)
        .fold(0.0_f64, |acc, (a, r)| acc.max((a - r).abs()));
    if infeasibility > 1e-9 * rhs_scale {
        return None;
    }

    let rank = rank_from_values(&decomp.values, 1e-12);
    let theta = if rank == p {
        particular
    } else {
        let null_basis = decomp.right_vectors.column_range(rank, p);
        let reduced_h = null_basis
            .transpose()
            .matmul(objective.h())
            .matmul(&null_basis);
        let grad_at_particular: Vec<f64> = objective
            .h()
            .matvec(&particular)
            .iter()
            .zip(objective.c())
            .map(|(hv, cv)| hv + cv)
            .collect();
        let reduced_b = null_basis.transpose().matvec(&grad_at_particular);
        let y: Vec<f64> = pinv(&reduced_h)
            .ok()?
            .matvec(&reduced_b)
            .iter()
            .map(|v| -v)
            .collect();
        let shift = null_basis.matvec(&y);
        particular.iter().zip(&shift).map(|(a, b)| a + b).collect()
    };

    if let Some(bounds) = bounds {
        let inside = theta
            .iter()
            .zip(bounds)
            .all(|(&t, &(lo, hi))| t >= lo - 1e-9 && t <= hi + 1e-9);
        if !inside {
            return None;
        }
    }
    Some(theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::AffineMatrixMap;

    #[test]
    fn penalty_terms_match_direct_evaluation() {
        let base = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let g1 = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let g2 = Matrix::from_rows(vec![vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let map = AffineMatrixMap::new(base, vec![g1, g2]).unwrap();
        let w = Matrix::from_rows(vec![vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        let (p, q, c0) = penalty_terms(&map, &w);
        for theta in [[0.3, -1.2], [0.0, 0.0], [2.0, 0.7]] {
            let direct = {
                let gw = map.eval(&theta).matmul(&w).frobenius_norm();
                gw * gw
            };
            let expanded = quad_value(&p.scale(2.0), &q.iter().map(|v| 2.0 * v).collect::<Vec<_>>(), &theta) + c0;
            assert!((direct - expanded).abs() < 1e-12, "{direct} vs {expanded}");
        }
    }

    #[test]
    fn unboxed_minimization_solves_normal_equations() {
        let a = Matrix::diag(&[2.0, 4.0]);
        let b = vec![-2.0, -8.0];
        let x = minimize_quadratic(&a, &b, None, &[0.0, 0.0]);
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn boxed_minimization_respects_bounds() {
        let a = Matrix::diag(&[2.0, 2.0]);
        let b = vec![-10.0, -10.0]; // unconstrained minimum at (5, 5)
        let x = minimize_quadratic(&a, &b, Some(&[(0.0, 1.0), (0.0, 2.0)]), &[0.5, 0.5]);
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn boxed_minimization_never_worsens_warm_start() {
        let a = Matrix::diag(&[1.0, 0.0]);
        let b = vec![0.5, 0.0];
        let warm = [0.25, 0.75];
        let x = minimize_quadratic(&a, &b, Some(&[(-1.0, 1.0), (-1.0, 1.0)]), &warm);
        assert!(quad_value(&a, &b, &x) <= quad_value(&a, &b, &warm) + 1e-15);
    }
}
