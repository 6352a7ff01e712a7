//! The canonical two-qubit model: Pauli matrices, the CHSH basis `H`, `H′`,
//! the rotation `R` between them, Bell states and the ideal operator `K`.
//!
//! Two-qubit coordinates are ordered `|00⟩, |01⟩, |10⟩, |11⟩` with the left
//! factor in the first tensor slot, matching [`kron`].

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_8, SQRT_2};

use crate::linalg::{kron, ComplexMatrix, ComplexVector, I, ZERO};

/// Tsirelson's bound `2√2`.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).expect("2x2")
}

/// `H = (Z + X)/√2`. Also the Hadamard gate used inside the extraction circuits.
pub fn h_observable() -> ComplexMatrix {
    ComplexMatrix::from_real(
        2,
        2,
        &[FRAC_1_SQRT_2, FRAC_1_SQRT_2, FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
    )
}

/// `H′ = (Z − X)/√2`.
pub fn h_prime() -> ComplexMatrix {
    ComplexMatrix::from_real(
        2,
        2,
        &[
            FRAC_1_SQRT_2,
            -FRAC_1_SQRT_2,
            -FRAC_1_SQRT_2,
            -FRAC_1_SQRT_2,
        ],
    )
}

pub fn hadamard_gate() -> ComplexMatrix {
    h_observable()
}

/// `R = sin(π/8) X + cos(π/8) Z`, with `RZR† = H` and `RXR† = H′`.
pub fn rotation_r() -> ComplexMatrix {
    let (s, c) = FRAC_PI_8.sin_cos();
    ComplexMatrix::from_real(2, 2, &[c, s, s, -c])
}

pub fn ket0() -> ComplexVector {
    ComplexVector::basis(2, 0)
}

pub fn ket1() -> ComplexVector {
    ComplexVector::basis(2, 1)
}

/// Bob's ancilla `|aux⟩ = R|0⟩`.
pub fn aux_state() -> ComplexVector {
    rotation_r().apply(&ket0())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [
        BellState::PhiPlus,
        BellState::PhiMinus,
        BellState::PsiPlus,
        BellState::PsiMinus,
    ];
}

pub fn bell_state(kind: BellState) -> ComplexVector {
    let h = FRAC_1_SQRT_2;
    let coords = match kind {
        BellState::PhiPlus => [h, 0.0, 0.0, h],
        BellState::PhiMinus => [h, 0.0, 0.0, -h],
        BellState::PsiPlus => [0.0, h, h, 0.0],
        BellState::PsiMinus => [0.0, h, -h, 0.0],
    };
    ComplexVector::from_real(&coords)
}

/// Unitary whose rows are `⟨Φ⁺|, ⟨Φ⁻|, ⟨Ψ⁺|, ⟨Ψ⁻|`: computational to Bell coordinates.
pub fn bell_basis_change() -> ComplexMatrix {
    let columns: Vec<ComplexVector> = BellState::ALL.iter().map(|&k| bell_state(k)).collect();
    ComplexMatrix::from_columns(&columns).dagger()
}

/// The ideal CHSH operator `K = √2 (Z⊗Z + X⊗X)`.
pub fn k_operator() -> ComplexMatrix {
    (&kron(&pauli_z(), &pauli_z()) + &kron(&pauli_x(), &pauli_x())).scale_real(SQRT_2)
}

/// Every fixed object of the canonical model in one place.
#[derive(Debug, Clone)]
pub struct CanonicalGates {
    pub z: ComplexMatrix,
    pub x: ComplexMatrix,
    pub h: ComplexMatrix,
    pub h_prime: ComplexMatrix,
    pub r: ComplexMatrix,
    pub ket0: ComplexVector,
    pub ket1: ComplexVector,
    pub aux: ComplexVector,
    pub bell: [ComplexVector; 4],
}

impl CanonicalGates {
    pub fn new() -> Self {
        Self {
            z: pauli_z(),
            x: pauli_x(),
            h: h_observable(),
            h_prime: h_prime(),
            r: rotation_r(),
            ket0: ket0(),
            ket1: ket1(),
            aux: aux_state(),
            bell: BellState::ALL.map(bell_state),
        }
    }

    /// The circuit Hadamard; the same matrix as the observable `H`.
    pub fn hadamard_gate(&self) -> &ComplexMatrix {
        &self.h
    }
}

impl Default for CanonicalGates {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, DEFAULT_HERMITIAN_TOL};

    const TIGHT: f64 = 1e-12;

    fn conj_by(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
        &(u * m) * &u.dagger()
    }

    #[test]
    fn bell_coordinates() {
        let h = FRAC_1_SQRT_2;
        assert_eq!(
            bell_state(BellState::PhiPlus),
            ComplexVector::from_real(&[h, 0.0, 0.0, h])
        );
        assert_eq!(
            bell_state(BellState::PsiMinus),
            ComplexVector::from_real(&[0.0, h, -h, 0.0])
        );
    }

    #[test]
    fn bell_states_orthonormal() {
        for (i, &a) in BellState::ALL.iter().enumerate() {
            for (j, &b) in BellState::ALL.iter().enumerate() {
                let ip = bell_state(a).dot(&bell_state(b));
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - expected).abs() < TIGHT && ip.im.abs() < TIGHT);
            }
        }
        let u = bell_basis_change();
        assert!((&u * &u.dagger()).max_abs_diff(&ComplexMatrix::identity(4)) < TIGHT);
    }

    #[test]
    fn k_acts_on_bell_basis() {
        let k = k_operator();
        let phi = bell_state(BellState::PhiPlus);
        assert!(k.apply(&phi).max_abs_diff(&phi.scale_real(TSIRELSON)) < TIGHT);
        let phi_minus = bell_state(BellState::PhiMinus);
        assert!(k.apply(&phi_minus).max_abs_diff(&ComplexVector::zeros(4)) < TIGHT);
        let psi_plus = bell_state(BellState::PsiPlus);
        assert!(k.apply(&psi_plus).max_abs_diff(&ComplexVector::zeros(4)) < TIGHT);
        let psi_minus = bell_state(BellState::PsiMinus);
        assert!(
            k.apply(&psi_minus)
                .max_abs_diff(&psi_minus.scale_real(-TSIRELSON))
                < TIGHT
        );
    }

    #[test]
    fn k_matches_chsh_form() {
        let (z, x, h, hp) = (pauli_z(), pauli_x(), h_observable(), h_prime());
        let chsh = &(&(&kron(&z, &h) + &kron(&z, &hp)) + &kron(&x, &h)) - &kron(&x, &hp);
        assert!(chsh.max_abs_diff(&k_operator()) < TIGHT);
    }

    #[test]
    fn k_spectrum() {
        let spec = hermitian_eig(&k_operator(), DEFAULT_HERMITIAN_TOL).unwrap();
        let expected = [TSIRELSON, 0.0, 0.0, -TSIRELSON];
        for (got, want) in spec.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        let top = &spec.eigenvectors[0];
        let overlap = top.dot(&bell_state(BellState::PhiPlus)).norm();
        assert!((overlap - 1.0).abs() < 1e-10);
        let bottom = &spec.eigenvectors[3];
        let overlap = bottom.dot(&bell_state(BellState::PsiMinus)).norm();
        assert!((overlap - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rotation_identities() {
        let r = rotation_r();
        assert!(conj_by(&r, &pauli_z()).max_abs_diff(&h_observable()) < TIGHT);
        assert!(conj_by(&r, &pauli_x()).max_abs_diff(&h_prime()) < TIGHT);
        assert!((&r * &r).max_abs_diff(&ComplexMatrix::identity(2)) < TIGHT);
        let (s, c) = FRAC_PI_8.sin_cos();
        assert!(aux_state().max_abs_diff(&ComplexVector::from_real(&[c, s])) < TIGHT);
    }

    #[test]
    fn gates_are_hermitian_involutions_and_pairs_anticommute() {
        let g = CanonicalGates::new();
        let id = ComplexMatrix::identity(2);
        for m in [&g.z, &g.x, &g.h, &g.h_prime, &g.r] {
            assert!(m.max_abs_diff(&m.dagger()) < TIGHT);
            assert!((m * m).max_abs_diff(&id) < TIGHT);
        }
        let zero = ComplexMatrix::zeros(2, 2);
        assert!(g.z.anticommutator(&g.x).max_abs_diff(&zero) < TIGHT);
        assert!(g.h.anticommutator(&g.h_prime).max_abs_diff(&zero) < TIGHT);
        assert_eq!(g.hadamard_gate(), &h_observable());
        let y = pauli_y();
        assert!((&y * &y).max_abs_diff(&id) < TIGHT);
    }
}
