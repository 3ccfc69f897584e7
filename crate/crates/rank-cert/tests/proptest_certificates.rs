use matrix_core::{numerical_rank, Matrix};
use proptest::prelude::*;
use rank_cert::{l0_certificate, right_certificate, verify_certificate, verify_l0, Side};

fn small_matrix() -> impl Strategy<Value = Matrix> {
    (1usize..=6, 1usize..=6)
        .prop_flat_map(|(m, n)| {
            (
                Just(m),
                Just(n),
                prop::collection::vec(-5.0..5.0f64, m * n),
            )
        })
        .prop_map(|(m, n, entries)| Matrix::from_vec(m, n, entries).unwrap())
}

fn sparse_vector() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(
        prop_oneof![3 => Just(0.0), 2 => -3.0..3.0f64],
        1..=10,
    )
}

proptest! {
    // Certifying at the observed rank always succeeds and verifies.
    #[test]
    fn certificate_at_observed_rank_verifies(g in small_matrix()) {
        let r = numerical_rank(&g, 1e-9);
        let cert = right_certificate(&g, r, 1e-9).unwrap();
        prop_assert!(cert.membership.member);
        let report = verify_certificate(&g, &cert.w, Side::Right, 1e-8).unwrap();
        prop_assert!(report.valid);
        prop_assert_eq!(report.certified_bound, r);
    }

    #[test]
    fn l0_certificate_at_observed_sparsity_verifies(x in sparse_vector()) {
        let nnz = x.iter().filter(|v| v.abs() > 1e-8).count();
        let cert = l0_certificate(&x, nnz).unwrap();
        prop_assert!(verify_l0(&x, &cert.w, nnz, 1e-8));
        // Shrinking the budget below the support must be rejected.
        if nnz > 0 {
            prop_assert!(l0_certificate(&x, nnz - 1).is_err());
        }
    }
}
