//! Abstract CHSH strategies: binary observables, the CHSH operator, the bias
//! and the sum-of-squares certificate behind Tsirelson's bound.

use std::f64::consts::SQRT_2;
use std::fmt;

use crate::canonical::TSIRELSON;
use crate::error::{dim_mismatch, LabError, Result};
use crate::linalg::{expectation, kron, mat_op_norm, vec_norm, ComplexMatrix, ComplexVector};

/// Default tolerance for binary-observable validation.
pub const OBSERVABLE_TOL: f64 = 1e-9;

/// Allowed deviation of `‖ψ‖` from one.
pub const STATE_NORM_TOL: f64 = 1e-10;

/// The constant `c = 128√2` of the anticommutator estimate.
pub const C_CONST: f64 = 128.0 * SQRT_2;

/// Above this deficit a strategy is reported as outside the small-ε regime.
pub const SMALL_EPS_CUTOFF: f64 = 0.1;

/// Error budget `δ(ε) = ε + 4√(cε)`.
pub fn delta(epsilon: f64) -> f64 {
    epsilon + 4.0 * (C_CONST * epsilon).sqrt()
}

/// Outcome of checking that a matrix is a Hermitian involution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// `‖M − M†‖` (operator norm).
    pub hermiticity_residual: f64,
    /// `‖M² − I‖` (operator norm).
    pub involution_residual: f64,
    pub tol: f64,
    pub valid: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "hermiticity residual {:.3e}, involution residual {:.3e}, tol {:.1e}",
            self.hermiticity_residual, self.involution_residual, self.tol
        )
    }
}

pub fn validate_binary_observable(m: &ComplexMatrix, tol: f64) -> ValidationReport {
    if !m.is_square() {
        return ValidationReport {
            hermiticity_residual: f64::INFINITY,
            involution_residual: f64::INFINITY,
            tol,
            valid: false,
        };
    }
    let hermiticity_residual = mat_op_norm(&(m - &m.dagger())).unwrap_or(f64::INFINITY);
    let square = m * m;
    let involution_residual =
        mat_op_norm(&(&square - &ComplexMatrix::identity(m.rows()))).unwrap_or(f64::INFINITY);
    ValidationReport {
        hermiticity_residual,
        involution_residual,
        tol,
        valid: hermiticity_residual <= tol && involution_residual <= tol,
    }
}

/// A Hermitian involution, validated once at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryObservable {
    matrix: ComplexMatrix,
    report: ValidationReport,
}

impl BinaryObservable {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self> {
        Self::named(matrix, tol, "observable")
    }

    pub fn named(matrix: ComplexMatrix, tol: f64, name: &str) -> Result<Self> {
        let report = validate_binary_observable(&matrix, tol);
        if !report.valid {
            return Err(LabError::InvalidObservable {
                name: name.to_string(),
                report,
            });
        }
        Ok(Self { matrix, report })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }
}

/// Shared unit state on `H_A ⊗ H_B` with two binary observables per party.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshStrategy {
    dim_a: usize,
    dim_b: usize,
    psi: ComplexVector,
    a0: BinaryObservable,
    a1: BinaryObservable,
    b0: BinaryObservable,
    b1: BinaryObservable,
}

impl ChshStrategy {
    /// Validates the four observables at `tol` and the state norm.
    pub fn new(
        psi: ComplexVector,
        a0: ComplexMatrix,
        a1: ComplexMatrix,
        b0: ComplexMatrix,
        b1: ComplexMatrix,
        tol: f64,
    ) -> Result<Self> {
        Self::from_observables(
            psi,
            BinaryObservable::named(a0, tol, "A0")?,
            BinaryObservable::named(a1, tol, "A1")?,
            BinaryObservable::named(b0, tol, "B0")?,
            BinaryObservable::named(b1, tol, "B1")?,
        )
    }

    pub fn from_observables(
        psi: ComplexVector,
        a0: BinaryObservable,
        a1: BinaryObservable,
        b0: BinaryObservable,
        b1: BinaryObservable,
    ) -> Result<Self> {
        let dim_a = a0.dim();
        let dim_b = b0.dim();
        if a1.dim() != dim_a {
            return Err(dim_mismatch(format!("A1 of dim {dim_a}"), a1.dim()));
        }
        if b1.dim() != dim_b {
            return Err(dim_mismatch(format!("B1 of dim {dim_b}"), b1.dim()));
        }
        if psi.dim() != dim_a * dim_b {
            return Err(dim_mismatch(
                format!("state of dim {}", dim_a * dim_b),
                psi.dim(),
            ));
        }
        let norm = vec_norm(&psi);
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(LabError::NotNormalized { norm });
        }
        Ok(Self {
            dim_a,
            dim_b,
            psi,
            a0,
            a1,
            b0,
            b1,
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn psi(&self) -> &ComplexVector {
        &self.psi
    }

    pub fn a0(&self) -> &ComplexMatrix {
        self.a0.matrix()
    }

    pub fn a1(&self) -> &ComplexMatrix {
        self.a1.matrix()
    }

    pub fn b0(&self) -> &ComplexMatrix {
        self.b0.matrix()
    }

    pub fn b1(&self) -> &ComplexMatrix {
        self.b1.matrix()
    }

    pub fn observables(&self) -> [&BinaryObservable; 4] {
        [&self.a0, &self.a1, &self.b0, &self.b1]
    }

    /// Same observables, different state.
    pub fn with_state(&self, psi: ComplexVector) -> Result<Self> {
        Self::from_observables(
            psi,
            self.a0.clone(),
            self.a1.clone(),
            self.b0.clone(),
            self.b1.clone(),
        )
    }

    /// Lifts an Alice-side operator to `A ⊗ I`.
    pub fn alice_op(&self, a: &ComplexMatrix) -> ComplexMatrix {
        kron(a, &ComplexMatrix::identity(self.dim_b))
    }

    /// Lifts a Bob-side operator to `I ⊗ B`.
    pub fn bob_op(&self, b: &ComplexMatrix) -> ComplexMatrix {
        kron(&ComplexMatrix::identity(self.dim_a), b)
    }

    /// Conjugates the state and observables by local unitaries:
    /// `ψ → (U_A ⊗ U_B)ψ`, `A_i → U_A A_i U_A†`, `B_j → U_B B_j U_B†`.
    pub fn conjugated(&self, ua: &ComplexMatrix, ub: &ComplexMatrix, tol: f64) -> Result<Self> {
        let conj = |u: &ComplexMatrix, m: &ComplexMatrix| &(u * m) * &u.dagger();
        let psi = kron(ua, ub).try_apply(&self.psi)?;
        Self::new(
            psi,
            conj(ua, self.a0()),
            conj(ua, self.a1()),
            conj(ub, self.b0()),
            conj(ub, self.b1()),
            tol,
        )
    }
}

/// `A0⊗B0 + A0⊗B1 + A1⊗B0 − A1⊗B1` from raw matrices.
pub fn chsh_operator_of(
    a0: &ComplexMatrix,
    a1: &ComplexMatrix,
    b0: &ComplexMatrix,
    b1: &ComplexMatrix,
) -> ComplexMatrix {
    let sum = b0 + b1;
    let diff = b0 - b1;
    &kron(a0, &sum) + &kron(a1, &diff)
}

pub fn chsh_operator(s: &ChshStrategy) -> ComplexMatrix {
    chsh_operator_of(s.a0(), s.a1(), s.b0(), s.b1())
}

/// `β(S) = Re⟨ψ|CHSH|ψ⟩`.
pub fn bias(s: &ChshStrategy) -> f64 {
    expectation(&chsh_operator(s), s.psi())
}

/// `max(0, 2√2 − β(S))`, the smallest ε with `β ≥ 2√2 − ε`.
pub fn epsilon_deficit(s: &ChshStrategy) -> f64 {
    (TSIRELSON - bias(s)).max(0.0)
}

/// Operator-norm residual of `2√2 I − CHSH = (P†P + Q†Q)/√2` with
/// `P = (A0+A1)/√2 ⊗ I − I ⊗ B0` and `Q = (A1−A0)/√2 ⊗ I + I ⊗ B1`.
///
/// No validation: for matrices that are not involutions the residual is
/// simply nonzero.
pub fn sos_residual_of(
    a0: &ComplexMatrix,
    a1: &ComplexMatrix,
    b0: &ComplexMatrix,
    b1: &ComplexMatrix,
) -> Result<f64> {
    let (da, db) = (a0.rows(), b0.rows());
    if !a0.is_square() || a1.rows() != da || !a1.is_square() {
        return Err(dim_mismatch(
            format!("Alice observables {da}x{da}"),
            format!("{}x{}", a1.rows(), a1.cols()),
        ));
    }
    if !b0.is_square() || b1.rows() != db || !b1.is_square() {
        return Err(dim_mismatch(
            format!("Bob observables {db}x{db}"),
            format!("{}x{}", b1.rows(), b1.cols()),
        ));
    }
    let ia = ComplexMatrix::identity(da);
    let ib = ComplexMatrix::identity(db);
    let inv_sqrt2 = 1.0 / SQRT_2;
    let p = &kron(&(a0 + a1).scale_real(inv_sqrt2), &ib) - &kron(&ia, b0);
    let q = &kron(&(a1 - a0).scale_real(inv_sqrt2), &ib) + &kron(&ia, b1);
    let sos = (&(&p.dagger() * &p) + &(&q.dagger() * &q)).scale_real(inv_sqrt2);
    let lhs =
        &ComplexMatrix::identity(da * db).scale_real(TSIRELSON) - &chsh_operator_of(a0, a1, b0, b1);
    mat_op_norm(&(&lhs - &sos))
}

/// SOS residual after validating every observable at `tol`.
pub fn checked_sos_residual(
    a0: &ComplexMatrix,
    a1: &ComplexMatrix,
    b0: &ComplexMatrix,
    b1: &ComplexMatrix,
    tol: f64,
) -> Result<f64> {
    for (name, m) in [("A0", a0), ("A1", a1), ("B0", b0), ("B1", b1)] {
        let report = validate_binary_observable(m, tol);
        if !report.valid {
            return Err(LabError::InvalidObservable {
                name: name.to_string(),
                report,
            });
        }
    }
    sos_residual_of(a0, a1, b0, b1)
}

pub fn tsirelson_sos_residual(s: &ChshStrategy) -> Result<f64> {
    sos_residual_of(s.a0(), s.a1(), s.b0(), s.b1())
}

/// Anticommutator expectations `⟨ψ|{A0,A1}² ⊗ I|ψ⟩` and `⟨ψ|I ⊗ {B0,B1}²|ψ⟩`,
/// computed as `‖({A0,A1} ⊗ I)ψ‖²` and its Bob counterpart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnticommutatorExpectation {
    pub alice: f64,
    pub bob: f64,
}

pub fn anticommutator_expectation(s: &ChshStrategy) -> AnticommutatorExpectation {
    let alice = s
        .alice_op(&s.a0().anticommutator(s.a1()))
        .apply(s.psi())
        .norm_sqr();
    let bob = s
        .bob_op(&s.b0().anticommutator(s.b1()))
        .apply(s.psi())
        .norm_sqr();
    AnticommutatorExpectation { alice, bob }
}
