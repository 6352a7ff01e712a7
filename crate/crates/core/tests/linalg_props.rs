mod common;

use chsh_lab::linalg::{
    herm_fun, hermitian_eig, kron, mat_op_norm, partial_trace_a, partial_trace_b, ComplexMatrix,
    DEFAULT_HERMITIAN_TOL,
};
use common::{complex_matrix, hermitian, square_matrix};
use proptest::prelude::*;

fn close(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> bool {
    a.max_abs_diff(b) <= tol
}

proptest! {
    #[test]
    fn kron_is_associative(a in square_matrix(3), b in square_matrix(2), c in square_matrix(2)) {
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn kron_mixed_product(
        (a, c) in (1usize..=3).prop_flat_map(|n| (complex_matrix(n, n), complex_matrix(n, n))),
        (b, d) in (1usize..=3).prop_flat_map(|n| (complex_matrix(n, n), complex_matrix(n, n))),
    ) {
        let left = &kron(&a, &b) * &kron(&c, &d);
        let right = kron(&(&a * &c), &(&b * &d));
        prop_assert!(close(&left, &right, 1e-11));
    }

    #[test]
    fn herm_fun_identity_reconstructs(n in 1usize..=6, seed in any::<u64>()) {
        let m = hermitian(n, seed);
        let back = herm_fun(&m, |x| x, DEFAULT_HERMITIAN_TOL).unwrap();
        prop_assert!(close(&back, &m, 1e-10));
    }

    #[test]
    fn eigenvectors_orthonormal_and_sorted(n in 1usize..=8, seed in any::<u64>()) {
        let spec = hermitian_eig(&hermitian(n, seed), DEFAULT_HERMITIAN_TOL).unwrap();
        prop_assert!(spec.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        let v = ComplexMatrix::from_columns(&spec.eigenvectors);
        prop_assert!(close(&(&v.dagger() * &v), &ComplexMatrix::identity(n), 1e-10));
    }

    #[test]
    fn eig_is_deterministic(n in 1usize..=6, seed in any::<u64>()) {
        let m = hermitian(n, seed);
        let first = hermitian_eig(&m, DEFAULT_HERMITIAN_TOL).unwrap();
        let second = hermitian_eig(&m, DEFAULT_HERMITIAN_TOL).unwrap();
        prop_assert_eq!(first, second);
    }

    #[test]
    fn partial_traces_of_products(
        a in square_matrix(3),
        b in square_matrix(3),
    ) {
        let (da, db) = (a.rows(), b.rows());
        let ab = kron(&a, &b);
        let over_b = partial_trace_b(&ab, da, db).unwrap();
        prop_assert!(close(&over_b, &a.scale(b.trace()), 1e-11));
        let over_a = partial_trace_a(&ab, da, db).unwrap();
        prop_assert!(close(&over_a, &b.scale(a.trace()), 1e-11));
        let t = over_b.trace() - ab.trace();
        prop_assert!(t.norm() < 1e-10);
    }

    #[test]
    fn op_norm_multiplies_under_kron(a in square_matrix(3), b in square_matrix(3)) {
        let product = mat_op_norm(&kron(&a, &b)).unwrap();
        let separate = mat_op_norm(&a).unwrap() * mat_op_norm(&b).unwrap();
        prop_assert!((product - separate).abs() <= 1e-9 * separate.max(1.0));
    }

    #[test]
    fn op_norm_bounded_by_frobenius(m in (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| complex_matrix(r, c))) {
        let op = mat_op_norm(&m).unwrap();
        let fro = m.frobenius_norm();
        prop_assert!(op <= fro * (1.0 + 1e-12) + 1e-12);
        prop_assert!(fro <= op * (m.rows().min(m.cols()) as f64).sqrt() * (1.0 + 1e-9) + 1e-12);
    }
}
