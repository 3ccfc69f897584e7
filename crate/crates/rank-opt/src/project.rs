use matrix_core::{svd, Matrix};

/// Best Frobenius-norm approximation of `g` with rank at most `r`
/// (truncated SVD). `r` past `min(m, n)` truncates nothing. This closed
/// form serves as the oracle the iterative solvers are checked against.
pub fn project_rank(g: &Matrix, r: usize) -> Matrix {
    let (m, n) = g.dims();
    let keep = r.min(m.min(n));
    if keep == 0 {
        return Matrix::zeros(m, n);
    }
    let d = svd(g).expect("svd convergence");
    Matrix::from_fn(m, n, |i, j| {
        (0..keep)
            .map(|k| d.values[k] * d.left_vectors.get(i, k) * d.right_vectors.get(j, k))
            .sum()
    })
}
