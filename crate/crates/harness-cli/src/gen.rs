//! Seeded instance generators with planted structure.
//!
//! All randomness flows from one explicit 64-bit seed through a ChaCha20
//! stream (`rand_chacha::ChaCha20Rng::seed_from_u64`); Gaussian entries
//! come from `rand_distr::StandardNormal`. Both generators are stable,
//! documented algorithms, so a (kind, dims, planted, noise, seed) tuple
//! reproduces the same instance everywhere.

use matrix_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rank_opt::AffineMatrixMap;

use crate::HarnessError;

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha20Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn gaussian_vector(rng: &mut ChaCha20Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Product of Gaussian factors with inner dimension `rank`, plus optional
/// Gaussian noise; the planted rank is exact for `noise = 0`.
pub fn planted_low_rank(
    rng: &mut ChaCha20Rng,
    rows: usize,
    cols: usize,
    rank: usize,
    noise: f64,
) -> Matrix {
    let mut out = if rank == 0 {
        Matrix::zeros(rows, cols)
    } else {
        let a = gaussian_matrix(rng, rows, rank);
        let b = gaussian_matrix(rng, rank, cols);
        a.matmul(&b)
    };
    if noise > 0.0 {
        out = out.add(&gaussian_matrix(rng, rows, cols).scale(noise));
    }
    out
}

/// Orthonormal basis for the range of a Gaussian `n×k` draw.
pub fn random_orthonormal(rng: &mut ChaCha20Rng, n: usize, k: usize) -> Matrix {
    assert!(k >= 1 && k <= n);
    let x = gaussian_matrix(rng, n, k);
    matrix_core::svd(&x)
        .expect("svd convergence")
        .left_vectors
        .column_range(0, k)
}

/// Random orthogonal projector of the given rank (a member of Φ_{n, n−rank}).
pub fn random_projector(rng: &mut ChaCha20Rng, n: usize, rank: usize) -> Matrix {
    if rank == 0 {
        return Matrix::zeros(n, n);
    }
    let q = random_orthonormal(rng, n, rank);
    q.matmul(&q.transpose())
}

/// Random symmetric positive semidefinite matrix `BBᵀ`.
pub fn random_psd(rng: &mut ChaCha20Rng, n: usize) -> Matrix {
    let b = gaussian_matrix(rng, n, n);
    b.matmul(&b.transpose()).symmetrized()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowRankInstance {
    pub matrix: Matrix,
    pub rank: usize,
}

pub fn gen_low_rank(
    rows: usize,
    cols: usize,
    rank: usize,
    noise: f64,
    seed: u64,
) -> Result<LowRankInstance, HarnessError> {
    check_dims(rows, cols)?;
    if rank > rows.min(cols) {
        return Err(HarnessError::InvalidGen(format!(
            "planted rank {rank} exceeds min dimension {}",
            rows.min(cols)
        )));
    }
    let mut rng = rng_from_seed(seed);
    Ok(LowRankInstance {
        matrix: planted_low_rank(&mut rng, rows, cols, rank, noise),
        rank,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseLsInstance {
    pub a: Matrix,
    pub b: Vec<f64>,
    pub x_star: Vec<f64>,
    pub sparsity: usize,
}

/// Least-squares instance with an exactly `k`-sparse planted solution.
/// Support positions are a seeded partial shuffle; values sit in
/// `±[1, 2]` so the support is unambiguous.
pub fn gen_sparse_ls(
    rows: usize,
    cols: usize,
    sparsity: usize,
    noise: f64,
    seed: u64,
) -> Result<SparseLsInstance, HarnessError> {
    check_dims(rows, cols)?;
    if sparsity > cols {
        return Err(HarnessError::InvalidGen(format!(
            "planted sparsity {sparsity} exceeds column count {cols}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let a = gaussian_matrix(&mut rng, rows, cols);
    let mut positions: Vec<usize> = (0..cols).collect();
    for i in 0..sparsity {
        let j = rng.random_range(i..cols);
        positions.swap(i, j);
    }
    let mut x_star = vec![0.0; cols];
    for &i in positions.iter().take(sparsity) {
        let sign = if rng.random_range(0..2) == 0 { 1.0 } else { -1.0 };
        x_star[i] = sign * rng.random_range(1.0..2.0);
    }
    let mut b = a.matvec(&x_star);
    if noise > 0.0 {
        for v in b.iter_mut() {
            let bump: f64 = StandardNormal.sample(&mut rng);
            *v += noise * bump;
        }
    }
    Ok(SparseLsInstance {
        a,
        b,
        x_star,
        sparsity,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffineRankInstance {
    pub map: AffineMatrixMap,
    pub theta_star: Vec<f64>,
    pub rank: usize,
}

/// Number of parameters in generated affine-rank instances.
pub const AFFINE_RANK_ARITY: usize = 3;

/// Affine family whose rank constraint is satisfiable by construction:
/// the base is chosen so `G(θ*)` is a planted rank-`rank` matrix.
pub fn gen_affine_rank(
    rows: usize,
    cols: usize,
    rank: usize,
    noise: f64,
    seed: u64,
) -> Result<AffineRankInstance, HarnessError> {
    check_dims(rows, cols)?;
    if rank > rows.min(cols) {
        return Err(HarnessError::InvalidGen(format!(
            "planted rank {rank} exceeds min dimension {}",
            rows.min(cols)
        )));
    }
    let mut rng = rng_from_seed(seed);
    let coefficients: Vec<Matrix> = (0..AFFINE_RANK_ARITY)
        .map(|_| gaussian_matrix(&mut rng, rows, cols))
        .collect();
    let theta_star = gaussian_vector(&mut rng, AFFINE_RANK_ARITY);
    let target = planted_low_rank(&mut rng, rows, cols, rank, noise);
    let mut base = target;
    for (t, g) in theta_star.iter().zip(&coefficients) {
        base = base.sub(&g.scale(*t));
    }
    let map = AffineMatrixMap::new(base, coefficients).expect("dimensions match by construction");
    Ok(AffineRankInstance {
        map,
        theta_star,
        rank,
    })
}

fn check_dims(rows: usize, cols: usize) -> Result<(), HarnessError> {
    if rows == 0 || cols == 0 {
        return Err(HarnessError::InvalidGen(format!(
            "dimensions must be positive, got {rows}x{cols}"
        )));
    }
    Ok(())
}
