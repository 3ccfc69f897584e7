use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by matrix construction and decomposition.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("matrix dimensions must be positive, got {rows}x{cols}")]
    ZeroDimension { rows: usize, cols: usize },
    #[error("entry count {got} does not match {rows}x{cols}")]
    ShapeMismatch { rows: usize, cols: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: asymmetry {asymmetry:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric { asymmetry: f64, tol: f64 },
    #[error("decomposition failed to converge")]
    DecompositionFailed,
}

/// Dense real matrix, row-major. Entries are always finite: every
/// constructor rejects NaN and infinities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
}

impl Matrix {
    pub fn from_vec(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self, MatrixError> {
        if rows == 0 || cols == 0 {
            return Err(MatrixError::ZeroDimension { rows, cols });
        }
        if entries.len() != rows * cols {
            return Err(MatrixError::ShapeMismatch {
                rows,
                cols,
                got: entries.len(),
            });
        }
        if let Some(pos) = entries.iter().position(|v| !v.is_finite()) {
            return Err(MatrixError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, MatrixError> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(m * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(MatrixError::ShapeMismatch {
                    rows: m,
                    cols: n,
                    got: i * n + row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::from_vec(m, n, entries)
    }

    /// Builds a matrix entrywise. Panics if `f` yields a non-finite value;
    /// callers pass closed-form expressions over finite inputs.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let v = f(i, j);
                assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
                entries.push(v);
            }
        }
        Self { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            entries: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        assert!(v.is_finite(), "non-finite entry at ({i}, {j})");
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        assert!(i < self.rows, "row index out of bounds");
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        assert!(j < self.cols, "column index out of bounds");
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// Submatrix made of columns `lo..hi`.
    pub fn column_range(&self, lo: usize, hi: usize) -> Matrix {
        assert!(lo < hi && hi <= self.cols, "column range out of bounds");
        Matrix::from_fn(self.rows, hi - lo, |i, j| self.get(i, j + lo))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entries[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let row_k = &other.entries[k * other.cols..(k + 1) * other.cols];
                let out_i = &mut out[i * other.cols..(i + 1) * other.cols];
                for (o, b) in out_i.iter_mut().zip(row_k) {
                    *o += a * b;
                }
            }
        }
        Matrix {
            rows: self.rows,
            cols: other.cols,
            entries: out,
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "inner dimensions must agree");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dims(), other.dims(), "dimensions must agree");
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + other.get(i, j))
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dims(), other.dims(), "dimensions must agree");
        Matrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - other.get(i, j))
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| s * self.get(i, j))
    }

    pub fn trace(&self) -> f64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Frobenius inner product `⟨A, B⟩ = Σ a_ij b_ij`.
    pub fn fro_dot(&self, other: &Matrix) -> f64 {
        assert_eq!(self.dims(), other.dims(), "dimensions must agree");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }

    /// Largest `|a_ij − a_ji|` over all pairs; zero for non-square input is
    /// not defined, callers check squareness first.
    pub fn max_asymmetry(&self) -> f64 {
        assert!(self.is_square(), "asymmetry requires a square matrix");
        let mut worst = 0.0_f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    pub fn symmetrized(&self) -> Matrix {
        assert!(self.is_square(), "symmetrization requires a square matrix");
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i))
        })
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let err = Matrix::from_vec(2, 2, vec![1.0, f64::NAN, 0.0, 1.0]).unwrap_err();
        assert_eq!(err, MatrixError::NonFinite { row: 0, col: 1 });
        let err = Matrix::from_vec(1, 2, vec![f64::INFINITY, 0.0]).unwrap_err();
        assert_eq!(err, MatrixError::NonFinite { row: 0, col: 0 });
    }

    #[test]
    fn rejects_shape_mismatch() {
        let err = Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0]).unwrap_err();
        assert!(matches!(err, MatrixError::ShapeMismatch { got: 3, .. }));
    }

    #[test]
    fn rejects_zero_dimensions() {
        let err = Matrix::from_vec(0, 3, vec![]).unwrap_err();
        assert!(matches!(err, MatrixError::ZeroDimension { .. }));
    }

    #[test]
    fn matmul_matches_hand_result() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(vec![vec![5.0, 6.0], vec![7.0, 8.0]]).unwrap();
        let c = a.matmul(&b);
        assert_eq!(c.entries(), &[19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn trace_and_norm() {
        let a = Matrix::diag(&[3.0, -1.0]);
        assert_eq!(a.trace(), 2.0);
        assert!((a.frobenius_norm() - 10.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn transpose_round_trip() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(a.transpose().transpose(), a);
    }
}
