#![allow(dead_code)]

use chsh_lab::linalg::{herm_fun, Complex64, ComplexMatrix, DEFAULT_HERMITIAN_TOL};
use chsh_lab::strategies::random_hermitian;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), rows * cols).prop_map(move |entries| {
        let data = entries
            .into_iter()
            .map(|(re, im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(rows, cols, data).unwrap()
    })
}

pub fn square_matrix(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim).prop_flat_map(|n| complex_matrix(n, n))
}

pub fn hermitian(n: usize, seed: u64) -> ComplexMatrix {
    random_hermitian(n, &mut rng(seed))
}

/// `exp(iH)` for a random Hermitian `H`.
pub fn unitary(n: usize, seed: u64) -> ComplexMatrix {
    let h = hermitian(n, seed).scale_real(3.0);
    let cos = herm_fun(&h, f64::cos, DEFAULT_HERMITIAN_TOL).unwrap();
    let sin = herm_fun(&h, f64::sin, DEFAULT_HERMITIAN_TOL).unwrap();
    &cos + &sin.scale(Complex64::new(0.0, 1.0))
}
