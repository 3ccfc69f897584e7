use matrix_core::{numerical_rank, pinv, svd, Matrix};
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..=6, 1usize..=6)
        .prop_flat_map(|(m, n)| {
            (
                Just(m),
                Just(n),
                prop::collection::vec(-10.0..10.0f64, m * n),
            )
        })
        .prop_map(|(m, n, entries)| Matrix::from_vec(m, n, entries).unwrap())
}

proptest! {
    #[test]
    fn transpose_preserves_singular_values(a in small_matrix()) {
        let s1 = svd(&a).unwrap().values;
        let s2 = svd(&a.transpose()).unwrap().values;
        let scale = a.frobenius_norm().max(1.0);
        for (x, y) in s1.iter().zip(&s2) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn rank_is_transpose_invariant(a in small_matrix()) {
        prop_assert_eq!(numerical_rank(&a, 1e-9), numerical_rank(&a.transpose(), 1e-9));
    }

    #[test]
    fn pinv_is_an_involution(a in small_matrix()) {
        let back = pinv(&pinv(&a).unwrap()).unwrap();
        let scale = a.frobenius_norm().max(1.0);
        prop_assert!(back.sub(&a).frobenius_norm() <= 1e-8 * scale);
    }
}
