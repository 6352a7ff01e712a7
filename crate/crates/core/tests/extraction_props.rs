mod common;

use chsh_lab::chsh::{anticommutator_expectation, C_CONST, OBSERVABLE_TOL};
use chsh_lab::extraction::{
    apply_reg_swap, build_va, build_vb, exact_intertwining_residuals, extract, reg_swap,
};
use chsh_lab::linalg::{ComplexMatrix, ComplexVector};
use chsh_lab::strategies::random_strategy;
use chsh_lab::LabError;
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=4, 2usize..=4)
}

fn vector(n: usize) -> impl Strategy<Value = ComplexVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(|v| {
        ComplexVector::new(
            v.into_iter()
                .map(|(re, im)| chsh_lab::linalg::Complex64::new(re, im))
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exact_intertwinings((da, db) in dims(), seed in any::<u64>()) {
        let s = random_strategy(da, db, seed).unwrap();
        let r = exact_intertwining_residuals(&s).unwrap();
        prop_assert!(r.alice <= 1e-9 && r.bob <= 1e-9, "{r:?}");
    }

    #[test]
    fn extraction_maps_are_isometries((da, db) in dims(), seed in any::<u64>()) {
        let s = random_strategy(da, db, seed).unwrap();
        let va = build_va(s.a0(), s.a1(), OBSERVABLE_TOL).unwrap();
        let vb = build_vb(s.b0(), s.b1(), OBSERVABLE_TOL).unwrap();
        prop_assert!((&va.dagger() * &va).max_abs_diff(&ComplexMatrix::identity(da)) <= 1e-10);
        prop_assert!((&vb.dagger() * &vb).max_abs_diff(&ComplexMatrix::identity(db)) <= 1e-10);
    }

    #[test]
    fn second_intertwining_tracks_anticommutator((da, db) in dims(), seed in any::<u64>()) {
        let s = random_strategy(da, db, seed).unwrap();
        match extract(&s) {
            Ok(r) => {
                let anti = anticommutator_expectation(&s);
                prop_assert!((r.alice_a1_intertwining - (anti.alice / 2.0).sqrt()).abs() <= 1e-9);
                prop_assert!((r.bob_b1_intertwining - (anti.bob / 2.0).sqrt()).abs() <= 1e-9);
                let bound = (C_CONST * r.epsilon).sqrt() + 1e-8;
                prop_assert!(r.alice_a1_intertwining <= bound && r.bob_b1_intertwining <= bound);
            }
            Err(LabError::DegenerateJunk { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn reg_swap_regroups_product_vectors(
        (da, db) in (1usize..=3, 1usize..=3),
        seed in any::<u64>(),
    ) {
        let mut r = common::rng(seed);
        let draw = |n: usize, r: &mut rand_chacha::ChaCha8Rng| chsh_lab::strategies::random_unit_vector(n, r);
        let (qa, ha, qb, hb) = (draw(2, &mut r), draw(da, &mut r), draw(2, &mut r), draw(db, &mut r));
        let before = qa.kron(&ha).kron(&qb.kron(&hb));
        let after = qa.kron(&qb).kron(&ha.kron(&hb));
        prop_assert!(apply_reg_swap(da, db, &before).max_abs_diff(&after) <= 1e-14);
        prop_assert!(reg_swap(da, db).apply(&before).max_abs_diff(&after) <= 1e-14);
    }

    #[test]
    fn reg_swap_matrix_matches_index_map(v in (1usize..=3, 1usize..=3).prop_flat_map(|(a, b)| (Just((a, b)), vector(4 * a * b)))) {
        let ((da, db), v) = v;
        let p = reg_swap(da, db);
        prop_assert!((&p.dagger() * &p).max_abs_diff(&ComplexMatrix::identity(4 * da * db)) == 0.0);
        prop_assert!(p.apply(&v).max_abs_diff(&apply_reg_swap(da, db, &v)) == 0.0);
    }
}
