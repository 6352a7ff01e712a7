//! The kernel convention for `M/|M|` and a two-dimensional strategy where it
//! breaks the anticommutation of the derived observables.

use crate::canonical::pauli_z;
use crate::linalg::{herm_fun, mat_op_norm, sign_matrix, ComplexMatrix, DEFAULT_HERMITIAN_TOL};
use crate::Result;

/// Anticommutator norms above this count as a refutation.
pub const REFUTATION_TOL: f64 = 1e-6;

/// `|M| = √(M²)`.
pub fn modulus(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    herm_fun(m, f64::abs, DEFAULT_HERMITIAN_TOL)
}

/// `M/|M|`, acting as the identity on the numerical kernel of `M`.
pub fn sign_with_kernel_convention(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    sign_matrix(m, DEFAULT_HERMITIAN_TOL)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub b0: ComplexMatrix,
    pub b1: ComplexMatrix,
    /// `(B0 + B1)/|B0 + B1|`.
    pub x_prime_b: ComplexMatrix,
    /// `(B0 − B1)/|B0 − B1|`.
    pub z_prime_b: ComplexMatrix,
    pub anticommutator: ComplexMatrix,
    pub anticommutator_norm: f64,
    pub claim_refuted: bool,
}

/// Derived observables for an arbitrary pair `B0`, `B1`.
pub fn derived_observables(b0: &ComplexMatrix, b1: &ComplexMatrix) -> Result<CounterexampleReport> {
    let x_prime_b = sign_with_kernel_convention(&(b0 + b1))?;
    let z_prime_b = sign_with_kernel_convention(&(b0 - b1))?;
    let anticommutator = x_prime_b.anticommutator(&z_prime_b);
    let anticommutator_norm = mat_op_norm(&anticommutator)?;
    Ok(CounterexampleReport {
        b0: b0.clone(),
        b1: b1.clone(),
        x_prime_b,
        z_prime_b,
        anticommutator,
        anticommutator_norm,
        claim_refuted: anticommutator_norm > REFUTATION_TOL,
    })
}

/// `B0 = B1 = σ_z`: then `X′ = σ_z`, `Z′ = I` and `{X′, Z′} = 2σ_z`.
pub fn reproduce_counterexample() -> CounterexampleReport {
    derived_observables(&pauli_z(), &pauli_z()).expect("Pauli inputs are Hermitian")
}
