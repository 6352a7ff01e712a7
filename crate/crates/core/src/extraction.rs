//! Local extraction isometries and the numerical rigidity bound chain.
//!
//! Alice's extractor is `V_A = U_A(|0⟩ ⊗ I)` with
//! `U_A = C_{A1} (H⊗I) C_{A0} (H⊗I)` (rightmost factor acts first). Bob's is
//! `V_B = U_B(|aux⟩ ⊗ I)` with `U_B = (R⊗I) U_A(B0, B1) (R†⊗I)` and
//! `|aux⟩ = R|0⟩`, which makes `(H⊗I)V_B = V_B B0` exact.
//!
//! The extracted state lives in `(ℂ²⊗ℂ²) ⊗ (H_A⊗H_B)` after [`reg_swap`].

use std::fmt;

use crate::canonical::{
    aux_state, bell_basis_change, bell_state, h_observable, h_prime, hadamard_gate, k_operator,
    ket0, pauli_x, pauli_z, rotation_r, BellState, TSIRELSON,
};
use crate::chsh::{
    anticommutator_expectation, bias, chsh_operator, delta, epsilon_deficit,
    validate_binary_observable, AnticommutatorExpectation, ChshStrategy, C_CONST, SMALL_EPS_CUTOFF,
};
use crate::error::{dim_mismatch, LabError, Result};
use crate::linalg::{kron, mat_op_norm, vec_norm, Complex64, ComplexMatrix, ComplexVector};

/// `DegenerateJunk` is raised when the Φ⁺-block has squared norm at or below this.
pub const JUNK_DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Slack in `satisfied ⇔ actual ≤ bound + slack` for [`BoundRecord`].
pub const BOUND_SLACK: f64 = 1e-12;

/// Controlled gate `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ A`.
pub fn control(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "control() needs a square matrix");
    let d = a.rows();
    let mut out = ComplexMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        out[(i, i)] = Complex64::new(1.0, 0.0);
        for j in 0..d {
            out[(d + i, d + j)] = a[(i, j)];
        }
    }
    out
}

/// Ancilla insertion `|anc⟩ ⊗ I_d` as a `(2d)×d` matrix.
pub fn embed(ancilla: &ComplexVector, d: usize) -> ComplexMatrix {
    let column = ComplexMatrix::from_columns(std::slice::from_ref(ancilla));
    kron(&column, &ComplexMatrix::identity(d))
}

fn check_pair(m0: &ComplexMatrix, m1: &ComplexMatrix, tol: f64, names: [&str; 2]) -> Result<()> {
    for (name, m) in names.into_iter().zip([m0, m1]) {
        let report = validate_binary_observable(m, tol);
        if !report.valid {
            return Err(LabError::InvalidObservable {
                name: name.to_string(),
                report,
            });
        }
    }
    if m0.rows() != m1.rows() {
        return Err(dim_mismatch(m0.rows(), m1.rows()));
    }
    Ok(())
}

fn ua_unchecked(a0: &ComplexMatrix, a1: &ComplexMatrix) -> ComplexMatrix {
    let d = a0.rows();
    let h = kron(&hadamard_gate(), &ComplexMatrix::identity(d));
    let first = &control(a0) * &h;
    &(&control(a1) * &h) * &first
}

fn ub_unchecked(b0: &ComplexMatrix, b1: &ComplexMatrix) -> ComplexMatrix {
    let d = b0.rows();
    let r = rotation_r();
    let id = ComplexMatrix::identity(d);
    let r_left = kron(&r, &id);
    let r_right = kron(&r.dagger(), &id);
    &(&r_left * &ua_unchecked(b0, b1)) * &r_right
}

fn va_unchecked(a0: &ComplexMatrix, a1: &ComplexMatrix) -> ComplexMatrix {
    &ua_unchecked(a0, a1) * &embed(&ket0(), a0.rows())
}

fn vb_unchecked(b0: &ComplexMatrix, b1: &ComplexMatrix) -> ComplexMatrix {
    &ub_unchecked(b0, b1) * &embed(&aux_state(), b0.rows())
}

/// `U_A = C_{A1} (H⊗I) C_{A0} (H⊗I)`.
pub fn unitary_ua(a0: &ComplexMatrix, a1: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    check_pair(a0, a1, tol, ["A0", "A1"])?;
    Ok(ua_unchecked(a0, a1))
}

/// `U_B = (R⊗I) C_{B1} (H⊗I) C_{B0} (H⊗I) (R†⊗I)`.
pub fn unitary_ub(b0: &ComplexMatrix, b1: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    check_pair(b0, b1, tol, ["B0", "B1"])?;
    Ok(ub_unchecked(b0, b1))
}

/// `V_A = U_A(|0⟩ ⊗ I)`.
pub fn build_va(a0: &ComplexMatrix, a1: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    check_pair(a0, a1, tol, ["A0", "A1"])?;
    Ok(va_unchecked(a0, a1))
}

/// `V_B = U_B(|aux⟩ ⊗ I)`.
pub fn build_vb(b0: &ComplexMatrix, b1: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    check_pair(b0, b1, tol, ["B0", "B1"])?;
    Ok(vb_unchecked(b0, b1))
}

/// Destination of basis index `((qa·dA + ha)·2dB + qb·dB + hb)` under the
/// regrouping, namely `((qa·2 + qb)·dA·dB + ha·dB + hb)`.
pub fn reg_swap_index(dim_a: usize, dim_b: usize, src: usize) -> usize {
    let hb = src % dim_b;
    let qb = (src / dim_b) % 2;
    let ha = (src / (2 * dim_b)) % dim_a;
    let qa = src / (2 * dim_b * dim_a);
    (qa * 2 + qb) * dim_a * dim_b + ha * dim_b + hb
}

/// Permutation `(ℂ²⊗H_A)⊗(ℂ²⊗H_B) → (ℂ²⊗ℂ²)⊗(H_A⊗H_B)`.
pub fn reg_swap(dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let n = 4 * dim_a * dim_b;
    let mut p = ComplexMatrix::zeros(n, n);
    for src in 0..n {
        p[(reg_swap_index(dim_a, dim_b, src), src)] = Complex64::new(1.0, 0.0);
    }
    p
}

/// Applies [`reg_swap`] to a vector by index permutation.
pub fn apply_reg_swap(dim_a: usize, dim_b: usize, v: &ComplexVector) -> ComplexVector {
    let n = 4 * dim_a * dim_b;
    assert_eq!(v.dim(), n, "reg_swap input dimension");
    let mut out = ComplexVector::zeros(n);
    for src in 0..n {
        out[reg_swap_index(dim_a, dim_b, src)] = v[src];
    }
    out
}

/// Operator-norm residuals of the exact intertwinings `(Z⊗I)V_A = V_A A0`
/// and `(H⊗I)V_B = V_B B0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactIntertwining {
    pub alice: f64,
    pub bob: f64,
}

pub fn exact_intertwining_residuals(s: &ChshStrategy) -> Result<ExactIntertwining> {
    let va = va_unchecked(s.a0(), s.a1());
    let vb = vb_unchecked(s.b0(), s.b1());
    let za = kron(&pauli_z(), &ComplexMatrix::identity(s.dim_a()));
    let hb = kron(&h_observable(), &ComplexMatrix::identity(s.dim_b()));
    let alice = mat_op_norm(&(&(&za * &va) - &(&va * s.a0())))?;
    let bob = mat_op_norm(&(&(&hb * &vb) - &(&vb * s.b0())))?;
    Ok(ExactIntertwining { alice, bob })
}

/// Everything measured when extracting the EPR pair from a strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionResult {
    pub dim_a: usize,
    pub dim_b: usize,
    pub bias: f64,
    /// Bias deficit `max(0, 2√2 − β)`.
    pub epsilon: f64,
    /// `ε + 4√(cε)`.
    pub delta: f64,
    /// `regSwap((V_A ⊗ V_B)ψ)`.
    pub psi_extracted: ComplexVector,
    /// Normalized Φ⁺-component of the extracted state, in `H_A ⊗ H_B`.
    pub junk: ComplexVector,
    pub projection_sq_norm: f64,
    pub state_error: f64,
    pub a0_error: f64,
    pub a1_error: f64,
    pub b0_error: f64,
    pub b1_error: f64,
    /// `Re⟨Ψ|(K ⊗ I)|Ψ⟩`.
    pub k_expectation: f64,
    /// `‖(K⊗I)Ψ − regSwap((V_A⊗V_B)·CHSH·ψ)‖`.
    pub phys_ideal_gap: f64,
    /// `‖(((X⊗I)V_A − V_A A1) ⊗ I)ψ‖`.
    pub alice_a1_intertwining: f64,
    /// `‖(I ⊗ ((H′⊗I)V_B − V_B B1))ψ‖`.
    pub bob_b1_intertwining: f64,
    pub anticommutator: AnticommutatorExpectation,
}

impl ExtractionResult {
    /// `Φ⁺ ⊗ junk`, the ideal state the extraction is compared against.
    pub fn ideal_state(&self) -> ComplexVector {
        bell_state(BellState::PhiPlus).kron(&self.junk)
    }
}

/// Unnormalized `(⟨Φ⁺| ⊗ I)Ψ`, read off as the first block after the Bell
/// basis change on the two-qubit factor.
fn phi_plus_block(psi_extracted: &ComplexVector, n: usize) -> ComplexVector {
    let change = kron(&bell_basis_change(), &ComplexMatrix::identity(n));
    let rotated = change.apply(psi_extracted);
    ComplexVector::from_vec(rotated.as_slice()[..n].to_vec())
}

pub fn extract(s: &ChshStrategy) -> Result<ExtractionResult> {
    let (da, db) = (s.dim_a(), s.dim_b());
    let n = da * db;
    let va = va_unchecked(s.a0(), s.a1());
    let vb = vb_unchecked(s.b0(), s.b1());
    let vab = kron(&va, &vb);
    let psi = s.psi();
    let lift = |v: &ComplexVector| apply_reg_swap(da, db, &vab.apply(v));

    let psi_extracted = lift(psi);
    let block = phi_plus_block(&psi_extracted, n);
    let projection_sq_norm = block.norm_sqr();
    if projection_sq_norm <= JUNK_DEGENERACY_THRESHOLD {
        return Err(LabError::DegenerateJunk { projection_sq_norm });
    }
    let junk = block.scale_real(1.0 / projection_sq_norm.sqrt());

    let phi = bell_state(BellState::PhiPlus);
    let id2 = ComplexMatrix::identity(2);
    let target = |qubit_op: ComplexMatrix| qubit_op.apply(&phi).kron(&junk);
    let distance = |physical: &ComplexMatrix, qubit_op: ComplexMatrix| {
        vec_norm(&(&lift(&physical.apply(psi)) - &target(qubit_op)))
    };

    let state_error = vec_norm(&(&psi_extracted - &phi.kron(&junk)));
    let a0_error = distance(&s.alice_op(s.a0()), kron(&pauli_z(), &id2));
    let a1_error = distance(&s.alice_op(s.a1()), kron(&pauli_x(), &id2));
    let b0_error = distance(&s.bob_op(s.b0()), kron(&id2, &h_observable()));
    let b1_error = distance(&s.bob_op(s.b1()), kron(&id2, &h_prime()));

    let k_big = kron(&k_operator(), &ComplexMatrix::identity(n));
    let ideal = k_big.apply(&psi_extracted);
    let k_expectation = psi_extracted.dot(&ideal).re;
    let physical = lift(&chsh_operator(s).apply(psi));
    let phys_ideal_gap = vec_norm(&(&ideal - &physical));

    let xa = kron(&pauli_x(), &ComplexMatrix::identity(da));
    let alice_gap = &(&xa * &va) - &(&va * s.a1());
    let alice_a1_intertwining =
        vec_norm(&kron(&alice_gap, &ComplexMatrix::identity(db)).apply(psi));
    let hpb = kron(&h_prime(), &ComplexMatrix::identity(db));
    let bob_gap = &(&hpb * &vb) - &(&vb * s.b1());
    let bob_b1_intertwining = vec_norm(&kron(&ComplexMatrix::identity(da), &bob_gap).apply(psi));

    let beta = bias(s);
    let epsilon = epsilon_deficit(s);
    Ok(ExtractionResult {
        dim_a: da,
        dim_b: db,
        bias: beta,
        epsilon,
        delta: delta(epsilon),
        psi_extracted,
        junk,
        projection_sq_norm,
        state_error,
        a0_error,
        a1_error,
        b0_error,
        b1_error,
        k_expectation,
        phys_ideal_gap,
        alice_a1_intertwining,
        bob_b1_intertwining,
        anticommutator: anticommutator_expectation(s),
    })
}

/// One inequality of the bound chain, phrased as `actual ≤ bound`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundRecord {
    pub name: &'static str,
    pub actual: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub small_eps_regime: bool,
}

impl BoundRecord {
    fn new(name: &'static str, actual: f64, bound: f64, small_eps_regime: bool) -> Self {
        Self {
            name,
            actual,
            bound,
            satisfied: actual <= bound + BOUND_SLACK,
            small_eps_regime,
        }
    }

    pub fn satisfied_within(&self, slack: f64) -> bool {
        self.actual <= self.bound + slack
    }

    pub fn margin(&self) -> f64 {
        self.bound - self.actual
    }
}

/// Closed-form bounds at a given deficit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoremBounds {
    pub epsilon: f64,
    pub delta: f64,
    /// `cε`.
    pub anticommutator: f64,
    /// `√(cε)`.
    pub intertwining: f64,
    /// `4√(cε)`.
    pub phys_ideal_gap: f64,
    /// `√(δ/√2)`; also the A0 and B0 bound.
    pub state: f64,
    /// `√(cε) + √(δ/√2)`; the A1 and B1 bound.
    pub rotated_operator: f64,
    /// `δ/(2√2)`, the allowed loss of Φ⁺ weight.
    pub projection_loss: f64,
}

impl TheoremBounds {
    pub fn at(epsilon: f64) -> Self {
        let d = delta(epsilon);
        let root = (C_CONST * epsilon).sqrt();
        let state = (d / std::f64::consts::SQRT_2).sqrt();
        Self {
            epsilon,
            delta: d,
            anticommutator: C_CONST * epsilon,
            intertwining: root,
            phys_ideal_gap: 4.0 * root,
            state,
            rotated_operator: root + state,
            projection_loss: d / TSIRELSON,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub epsilon: f64,
    pub delta: f64,
    pub small_eps_regime: bool,
    pub records: Vec<BoundRecord>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.records.iter().all(|r| r.satisfied)
    }

    pub fn all_satisfied_within(&self, slack: f64) -> bool {
        self.records.iter().all(|r| r.satisfied_within(slack))
    }

    pub fn get(&self, name: &str) -> Option<&BoundRecord> {
        self.records.iter().find(|r| r.name == name)
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "epsilon = {:.6e}, delta = {:.6e}{}",
            self.epsilon,
            self.delta,
            if self.small_eps_regime {
                ""
            } else {
                "  (outside small-epsilon regime)"
            }
        )?;
        for r in &self.records {
            writeln!(
                f,
                "  {:<22} actual {:>13.6e}  bound {:>13.6e}  {}",
                r.name,
                r.actual,
                r.bound,
                if r.satisfied { "ok" } else { "VIOLATED" }
            )?;
        }
        Ok(())
    }
}

/// Builds the bound report for an extraction already computed.
pub fn bound_report(result: &ExtractionResult) -> BoundReport {
    let b = TheoremBounds::at(result.epsilon);
    let small = result.epsilon <= SMALL_EPS_CUTOFF;
    let rec = |name, actual, bound| BoundRecord::new(name, actual, bound, small);
    let records = vec![
        rec(
            "alice_anticomm",
            result.anticommutator.alice,
            b.anticommutator,
        ),
        rec("bob_anticomm", result.anticommutator.bob, b.anticommutator),
        rec("phys_ideal_gap", result.phys_ideal_gap, b.phys_ideal_gap),
        rec(
            "k_expectation_lb",
            TSIRELSON - result.k_expectation,
            b.delta,
        ),
        rec(
            "projection_lb",
            1.0 - result.projection_sq_norm,
            b.projection_loss,
        ),
        rec("state_error", result.state_error, b.state),
        rec(
            "alice_a1_intertwining",
            result.alice_a1_intertwining,
            b.intertwining,
        ),
        rec(
            "bob_b1_intertwining",
            result.bob_b1_intertwining,
            b.intertwining,
        ),
        rec("a0_error", result.a0_error, b.state),
        rec("a1_error", result.a1_error, b.rotated_operator),
        rec("b0_error", result.b0_error, b.state),
        rec("b1_error", result.b1_error, b.rotated_operator),
    ];
    BoundReport {
        epsilon: result.epsilon,
        delta: b.delta,
        small_eps_regime: small,
        records,
    }
}

/// Extracts and checks every inequality of the chain at `ε = epsilon_deficit(S)`.
pub fn verify_theorem(s: &ChshStrategy) -> Result<BoundReport> {
    Ok(bound_report(&extract(s)?))
}
