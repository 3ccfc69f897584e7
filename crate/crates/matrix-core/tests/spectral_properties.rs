//! Seeded property suites for the spectral primitives.

use matrix_core::{numerical_rank, pinv, svd, sym_eig, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn random_matrix(rng: &mut ChaCha20Rng, m: usize, n: usize) -> Matrix {
    Matrix::from_fn(m, n, |_, _| rng.random_range(-5.0..5.0))
}

/// Product of full-rank factors with inner dimension `k`, so the planted
/// rank is known by construction.
fn planted_rank(rng: &mut ChaCha20Rng, m: usize, n: usize, k: usize) -> Matrix {
    if k == 0 {
        return Matrix::zeros(m, n);
    }
    let a = random_matrix(rng, m, k);
    let b = random_matrix(rng, k, n);
    a.matmul(&b)
}

#[test]
fn penrose_conditions_hold_on_random_matrices() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for case in 0..100 {
        let m = rng.random_range(1..=8);
        let n = rng.random_range(1..=8);
        let a = random_matrix(&mut rng, m, n);
        let p = pinv(&a).unwrap();
        let scale = a.frobenius_norm().max(1.0);

        let apa = a.matmul(&p).matmul(&a);
        assert!(
            apa.sub(&a).frobenius_norm() <= 1e-10 * scale,
            "A·A†·A = A failed on case {case}"
        );
        let pap = p.matmul(&a).matmul(&p);
        let pscale = p.frobenius_norm().max(1.0);
        assert!(
            pap.sub(&p).frobenius_norm() <= 1e-10 * pscale,
            "A†·A·A† = A† failed on case {case}"
        );
        let ap = a.matmul(&p);
        assert!(
            ap.sub(&ap.transpose()).frobenius_norm() <= 1e-10 * scale.max(pscale),
            "(A·A†)ᵀ = A·A† failed on case {case}"
        );
        let pa = p.matmul(&a);
        assert!(
            pa.sub(&pa.transpose()).frobenius_norm() <= 1e-10 * scale.max(pscale),
            "(A†·A)ᵀ = A†·A failed on case {case}"
        );
    }
}

#[test]
fn svd_reconstruction_and_orthonormality() {
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    for _ in 0..100 {
        let m = rng.random_range(1..=8);
        let n = rng.random_range(1..=8);
        let a = random_matrix(&mut rng, m, n);
        let d = svd(&a).unwrap();

        assert!(d.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(d.values.iter().all(|&s| s >= 0.0));

        let err = d.reconstruct().sub(&a).frobenius_norm();
        assert!(err <= 1e-10 * a.frobenius_norm().max(1e-300));

        for q in [&d.left_vectors, &d.right_vectors] {
            let gram = q.transpose().matmul(q);
            assert!(gram.sub(&Matrix::identity(q.cols())).max_abs() < 1e-10);
        }
    }
}

#[test]
fn numerical_rank_matches_planted_construction() {
    let mut rng = ChaCha20Rng::seed_from_u64(13);
    for _ in 0..100 {
        let m = rng.random_range(1..=8);
        let n = rng.random_range(1..=8);
        let k = rng.random_range(0..=m.min(n));
        let a = planted_rank(&mut rng, m, n, k);
        assert_eq!(numerical_rank(&a, 1e-9), k, "dims {m}x{n}, planted {k}");
    }
}

#[test]
fn sym_eig_matches_svd_in_absolute_value() {
    let mut rng = ChaCha20Rng::seed_from_u64(14);
    for _ in 0..100 {
        let n = rng.random_range(1..=8);
        let a = random_matrix(&mut rng, n, n).symmetrized();
        let eig = sym_eig(&a).unwrap();
        let mut abs_eigs: Vec<f64> = eig.values.iter().map(|v| v.abs()).collect();
        abs_eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
        let sing = svd(&a).unwrap().values;
        for (l, s) in abs_eigs.iter().zip(&sing) {
            assert!((l - s).abs() <= 1e-9 * a.frobenius_norm().max(1.0));
        }
        // Eigendecomposition reconstructs the input.
        let err = eig.reconstruct().sub(&a).frobenius_norm();
        assert!(err <= 1e-9 * a.frobenius_norm().max(1.0));
    }
}
