use crate::matrix::{Matrix, MatrixError};
use crate::{DEFAULT_RANK_TOL, SYMMETRY_TOL_FACTOR};

const MAX_SWEEPS: usize = 100;

/// Result of `svd` or `sym_eig`.
///
/// For an SVD of an `m×n` matrix the factors are complete: `left_vectors`
/// is `m×m`, `right_vectors` is `n×n`, and `values` holds the `min(m, n)`
/// singular values in nonincreasing order. Columns beyond `min(m, n)` span
/// the (left or right) null space and carry implicit singular value zero,
/// so null-space directions exist even when `m < n`.
///
/// For a symmetric eigendecomposition both vector matrices hold the same
/// `n×n` orthonormal eigenbasis and `values` holds the (possibly negative)
/// eigenvalues in nonincreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub left_vectors: Matrix,
    pub values: Vec<f64>,
    pub right_vectors: Matrix,
}

impl SpectralDecomposition {
    /// Rebuilds the decomposed matrix `U · Σ · Vᵀ` (with a rectangular Σ).
    pub fn reconstruct(&self) -> Matrix {
        let m = self.left_vectors.rows();
        let n = self.right_vectors.rows();
        Matrix::from_fn(m, n, |i, j| {
            self.values
                .iter()
                .enumerate()
                .map(|(k, s)| s * self.left_vectors.get(i, k) * self.right_vectors.get(j, k))
                .sum()
        })
    }

    /// Largest value, or 0 for an empty list.
    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Full singular value decomposition with completed orthonormal bases.
///
/// Computed by one-sided Jacobi: plane rotations orthogonalize the columns
/// of the (tall) working copy, accumulating the right factor exactly; the
/// method resolves small singular values with high relative accuracy,
/// which is what downstream null-space constructions rely on.
///
/// Vector signs are canonicalized: each right singular vector has its
/// largest-magnitude component positive (first such index on ties), with
/// the paired left vector flipped alongside it; unpaired completion
/// columns are canonicalized individually. This keeps outputs reproducible
/// across runs without changing any subspace.
pub fn svd(a: &Matrix) -> Result<SpectralDecomposition, MatrixError> {
    let (m, n) = a.dims();
    if m >= n {
        svd_tall(a)
    } else {
        // Factor the transpose and swap sides.
        let d = svd_tall(&a.transpose())?;
        Ok(SpectralDecomposition {
            left_vectors: d.right_vectors,
            values: d.values,
            right_vectors: d.left_vectors,
        })
    }
}

fn svd_tall(a: &Matrix) -> Result<SpectralDecomposition, MatrixError> {
    let (m, n) = a.dims();
    debug_assert!(m >= n);
    let mut work: Vec<Vec<f64>> = (0..n).map(|j| a.col(j)).collect();
    let mut v: Vec<Vec<f64>> = basis_columns(n);

    // Cyclic sweeps; stop once every column pair is orthogonal relative to
    // the column norms.
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = dot(&work[p], &work[p]);
                let beta = dot(&work[q], &work[q]);
                let gamma = dot(&work[p], &work[q]);
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_pair(&mut work, p, q, c, s);
                rotate_pair(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(MatrixError::DecompositionFailed);
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = work.iter().map(|c| dot(c, c).sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).expect("finite norms"));

    let values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let mut right: Vec<Vec<f64>> = order.iter().map(|&j| v[j].clone()).collect();

    // Left vectors: normalized transformed columns where the singular value
    // carries direction information; below the cutoff the direction is
    // noise, so those columns are rebuilt by basis completion instead.
    let cutoff = 1e-13 * values.first().copied().unwrap_or(0.0);
    let mut left: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (rank_pos, &j) in order.iter().enumerate() {
        if values[rank_pos] > cutoff && values[rank_pos] > 0.0 {
            let inv = 1.0 / values[rank_pos];
            left.push(work[j].iter().map(|x| x * inv).collect());
        } else {
            break;
        }
    }
    complete_basis(&mut left, m);

    // Paired sign convention keeps A = U Σ Vᵀ intact.
    for i in 0..n {
        if pivot_is_negative(&right[i]) {
            flip(&mut right[i]);
            flip(&mut left[i]);
        }
    }
    for col in left.iter_mut().skip(n) {
        if pivot_is_negative(col) {
            flip(col);
        }
    }

    Ok(SpectralDecomposition {
        left_vectors: from_columns(&left, m),
        values,
        right_vectors: from_columns(&right, n),
    })
}

/// Eigendecomposition of a symmetric matrix, eigenvalues nonincreasing.
///
/// Rejects input whose asymmetry exceeds `SYMMETRY_TOL_FACTOR · max(1, ‖A‖_F)`;
/// the remaining roundoff asymmetry is folded away by symmetrizing before
/// decomposing. Uses cyclic Jacobi rotations.
pub fn sym_eig(a: &Matrix) -> Result<SpectralDecomposition, MatrixError> {
    if !a.is_square() {
        return Err(MatrixError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let tol = SYMMETRY_TOL_FACTOR * a.frobenius_norm().max(1.0);
    let asymmetry = a.max_asymmetry();
    if asymmetry > tol {
        return Err(MatrixError::NotSymmetric { asymmetry, tol });
    }
    let n = a.rows();
    let sym = a.symmetrized();
    let scale = sym.frobenius_norm();

    let mut w: Vec<Vec<f64>> = (0..n).map(|i| sym.row(i).to_vec()).collect();
    let mut q: Vec<Vec<f64>> = basis_columns(n);

    let mut converged = scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut off = 0.0_f64;
        for p in 0..n {
            for i in (p + 1)..n {
                off += w[p][i] * w[p][i];
            }
        }
        if (2.0 * off).sqrt() <= 1e-14 * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apq = w[p][r];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (w[r][r] - w[p][p]) / (2.0 * apq);
                let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                apply_two_sided_rotation(&mut w, p, r, c, s);
                rotate_pair(&mut q, p, r, c, s);
            }
        }
    }
    if !converged {
        return Err(MatrixError::DecompositionFailed);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[j][j].partial_cmp(&w[i][i]).expect("finite values"));
    let values: Vec<f64> = order.iter().map(|&i| w[i][i]).collect();
    let mut vectors: Vec<Vec<f64>> = order.iter().map(|&i| q[i].clone()).collect();
    for col in vectors.iter_mut() {
        if pivot_is_negative(col) {
            flip(col);
        }
    }
    let q = from_columns(&vectors, n);
    Ok(SpectralDecomposition {
        left_vectors: q.clone(),
        values,
        right_vectors: q,
    })
}

/// Moore–Penrose pseudoinverse via the SVD, zeroing singular values at or
/// below `DEFAULT_RANK_TOL · σ_max`.
pub fn pinv(a: &Matrix) -> Result<Matrix, MatrixError> {
    let (m, n) = a.dims();
    let d = svd(a)?;
    let cutoff = DEFAULT_RANK_TOL * d.max_value();
    let mut out = Matrix::zeros(n, m);
    for (i, &s) in d.values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            continue;
        }
        let inv = 1.0 / s;
        for r in 0..n {
            let vr = d.right_vectors.get(r, i);
            if vr == 0.0 {
                continue;
            }
            for c in 0..m {
                let cur = out.get(r, c);
                out.set(r, c, cur + inv * vr * d.left_vectors.get(c, i));
            }
        }
    }
    Ok(out)
}

/// Number of singular values exceeding `rel_tol · σ_max`; 0 for the zero
/// matrix. `rel_tol` must be positive.
pub fn numerical_rank(a: &Matrix, rel_tol: f64) -> usize {
    assert!(rel_tol > 0.0, "rel_tol must be positive");
    let d = svd(a).expect("svd convergence");
    rank_from_values(&d.values, rel_tol)
}

/// Rank rule shared with callers that already hold the singular values.
pub fn rank_from_values(values: &[f64], rel_tol: f64) -> usize {
    let max = values.first().copied().unwrap_or(0.0);
    values.iter().filter(|&&s| s > rel_tol * max).count()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn basis_columns(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect()
}

/// Applies the rotation to columns `p` and `q` of a column list.
fn rotate_pair(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let len = cols[p].len();
    for i in 0..len {
        let xp = cols[p][i];
        let xq = cols[q][i];
        cols[p][i] = c * xp - s * xq;
        cols[q][i] = s * xp + c * xq;
    }
}

/// Two-sided Jacobi update `A ← JᵀAJ` for the rotation in the (p, q) plane,
/// on a full (symmetric, row-stored) working matrix.
fn apply_two_sided_rotation(w: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let n = w.len();
    for i in 0..n {
        let aip = w[i][p];
        let aiq = w[i][q];
        w[i][p] = c * aip - s * aiq;
        w[i][q] = s * aip + c * aiq;
    }
    for j in 0..n {
        let apj = w[p][j];
        let aqj = w[q][j];
        w[p][j] = c * apj - s * aqj;
        w[q][j] = s * apj + c * aqj;
    }
}

fn from_columns(cols: &[Vec<f64>], dim: usize) -> Matrix {
    Matrix::from_fn(dim, cols.len(), |i, j| cols[j][i])
}

fn pivot_is_negative(col: &[f64]) -> bool {
    let mut best = 0usize;
    for (i, v) in col.iter().enumerate() {
        if v.abs() > col[best].abs() {
            best = i;
        }
    }
    col[best] < 0.0
}

fn flip(col: &mut [f64]) {
    for v in col.iter_mut() {
        *v = -*v;
    }
}

/// Extends a set of orthonormal columns to a full basis of ℝ^dim.
///
/// Candidates are the standard basis vectors; each round picks the one with
/// the largest residual after projection (lowest index on ties), which makes
/// the completion deterministic. Two Gram–Schmidt passes keep the result
/// orthonormal to near machine precision.
fn complete_basis(cols: &mut Vec<Vec<f64>>, dim: usize) {
    while cols.len() < dim {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for j in 0..dim {
            let mut cand = vec![0.0; dim];
            cand[j] = 1.0;
            orthogonalize(&mut cand, cols);
            let norm = dot(&cand, &cand).sqrt();
            if best.as_ref().is_none_or(|(b, _)| norm > *b) {
                best = Some((norm, cand));
            }
        }
        let (norm, mut cand) = best.expect("dim > 0");
        assert!(norm > 1e-8, "basis completion lost rank");
        orthogonalize(&mut cand, cols);
        let norm = dot(&cand, &cand).sqrt();
        for v in cand.iter_mut() {
            *v /= norm;
        }
        cols.push(cand);
    }
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for q in basis {
        let d: f64 = dot(v, q);
        for (vi, qi) in v.iter_mut().zip(q) {
            *vi -= d * qi;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn orthonormality_error(q: &Matrix) -> f64 {
        let g = q.transpose().matmul(q);
        g.sub(&Matrix::identity(q.cols())).max_abs()
    }

    #[test]
    fn svd_identity() {
        let d = svd(&Matrix::identity(2)).unwrap();
        assert_close(d.values[0], 1.0, 1e-12);
        assert_close(d.values[1], 1.0, 1e-12);
        assert!(orthonormality_error(&d.left_vectors) < 1e-12);
        assert!(orthonormality_error(&d.right_vectors) < 1e-12);
    }

    #[test]
    fn svd_diagonal() {
        let d = svd(&Matrix::diag(&[3.0, 0.0])).unwrap();
        assert_close(d.values[0], 3.0, 1e-12);
        assert_close(d.values[1], 0.0, 1e-12);
    }

    #[test]
    fn svd_rank_one_ones() {
        // Eigenvalues of AᵀA solve λ² − 4λ = 0, so the singular values are 2 and 0.
        let a = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let d = svd(&a).unwrap();
        assert_close(d.values[0], 2.0, 1e-12);
        assert_close(d.values[1], 0.0, 1e-12);
    }

    #[test]
    fn svd_wide_matrix_has_complete_right_basis() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![0.0, 1.0, -1.0]]).unwrap();
        let d = svd(&a).unwrap();
        assert_eq!(d.right_vectors.dims(), (3, 3));
        assert_eq!(d.left_vectors.dims(), (2, 2));
        assert_eq!(d.values.len(), 2);
        assert!(orthonormality_error(&d.right_vectors) < 1e-12);
        // The completion column is a genuine null direction of A.
        let null = d.right_vectors.column_range(2, 3);
        assert!(a.matmul(&null).max_abs() < 1e-12);
        let err = d.reconstruct().sub(&a).frobenius_norm();
        assert!(err <= 1e-10 * a.frobenius_norm());
    }

    #[test]
    fn svd_tall_rank_deficient_pairs_factors_correctly() {
        // Rank-1 8×3 input: the trailing left vectors must span the left
        // null space, and reconstruction must hold.
        let u = [1.0, -2.0, 0.5, 3.0, -1.0, 0.25, 2.0, -0.75];
        let v = [2.0, 1.0, -1.0];
        let a = Matrix::from_fn(8, 3, |i, j| u[i] * v[j]);
        let d = svd(&a).unwrap();
        let err = d.reconstruct().sub(&a).frobenius_norm();
        assert!(err <= 1e-12 * a.frobenius_norm(), "reconstruction {err}");
        assert!(d.values[1] <= 1e-12 * d.values[0]);
        let tail = d.left_vectors.column_range(1, 8);
        let w = tail.matmul(&tail.transpose());
        assert!(w.matmul(&a).frobenius_norm() <= 1e-12 * a.frobenius_norm());
        assert!(orthonormality_error(&d.left_vectors) < 1e-12);
    }

    #[test]
    fn svd_zero_matrix() {
        let a = Matrix::zeros(2, 3);
        let d = svd(&a).unwrap();
        assert!(d.values.iter().all(|&s| s == 0.0));
        assert!(orthonormality_error(&d.right_vectors) < 1e-12);
        assert!(orthonormality_error(&d.left_vectors) < 1e-12);
    }

    #[test]
    fn sym_eig_zero_and_diagonal() {
        let d = sym_eig(&Matrix::zeros(3, 3)).unwrap();
        assert_eq!(d.values, vec![0.0, 0.0, 0.0]);
        let d = sym_eig(&Matrix::diag(&[0.2, 0.5])).unwrap();
        assert_close(d.values[0], 0.5, 1e-14);
        assert_close(d.values[1], 0.2, 1e-14);
    }

    #[test]
    fn sym_eig_two_by_two() {
        // Characteristic polynomial λ² − 4λ + 3 has roots 3 and 1.
        let a = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let d = sym_eig(&a).unwrap();
        assert_close(d.values[0], 3.0, 1e-12);
        assert_close(d.values[1], 1.0, 1e-12);
        let recon = d.reconstruct();
        assert!(recon.sub(&a).frobenius_norm() < 1e-12);
    }

    #[test]
    fn sym_eig_handles_negative_eigenvalues() {
        let a = Matrix::from_rows(vec![vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let d = sym_eig(&a).unwrap();
        assert_close(d.values[0], 2.0, 1e-12);
        assert_close(d.values[1], -2.0, 1e-12);
    }

    #[test]
    fn sym_eig_rejects_asymmetric_input() {
        let a = Matrix::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            sym_eig(&a).unwrap_err(),
            MatrixError::NotSymmetric { .. }
        ));
    }

    #[test]
    fn pinv_diagonal_keeps_zero() {
        let p = pinv(&Matrix::diag(&[2.0, 0.0])).unwrap();
        assert!(p.sub(&Matrix::diag(&[0.5, 0.0])).max_abs() < 1e-14);
    }

    #[test]
    fn pinv_zero_matrix() {
        let p = pinv(&Matrix::zeros(2, 3)).unwrap();
        assert_eq!(p.dims(), (3, 2));
        assert_eq!(p.max_abs(), 0.0);
    }

    #[test]
    fn pinv_column_of_ones() {
        // (AᵀA)⁻¹Aᵀ = ½ [1 1] by hand.
        let a = Matrix::from_rows(vec![vec![1.0], vec![1.0]]).unwrap();
        let p = pinv(&a).unwrap();
        assert_eq!(p.dims(), (1, 2));
        assert_close(p.get(0, 0), 0.5, 1e-14);
        assert_close(p.get(0, 1), 0.5, 1e-14);
    }

    #[test]
    fn numerical_rank_basics() {
        assert_eq!(numerical_rank(&Matrix::zeros(3, 3), 1e-9), 0);
        assert_eq!(numerical_rank(&Matrix::identity(3), 1e-9), 3);
        // Outer product a·bᵀ has rank 1.
        let a = [1.0, -2.0, 0.5];
        let b = [3.0, 1.0];
        let outer = Matrix::from_fn(3, 2, |i, j| a[i] * b[j]);
        assert_eq!(numerical_rank(&outer, 1e-9), 1);
    }

    #[test]
    fn sign_convention_is_deterministic() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, -3.0], vec![0.5, 0.1]]).unwrap();
        let d1 = svd(&a).unwrap();
        let d2 = svd(&a).unwrap();
        assert_eq!(d1, d2);
        // Every right vector's pivot entry is positive.
        for j in 0..d1.right_vectors.cols() {
            let col = d1.right_vectors.col(j);
            assert!(!super::pivot_is_negative(&col));
        }
    }
}
