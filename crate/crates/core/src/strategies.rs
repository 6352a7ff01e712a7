//! Strategy generators and the see-saw optimizer.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::{bell_state, h_observable, h_prime, pauli_x, pauli_y, pauli_z, BellState};
use crate::chsh::{bias, chsh_operator_of, BinaryObservable, ChshStrategy, OBSERVABLE_TOL};
use crate::error::{LabError, Result};
use crate::linalg::{
    herm_fun, hermitian_eig, hermitian_part, kernel_threshold, kron, partial_trace_a,
    partial_trace_b, sign_matrix, vec_norm, Complex64, ComplexMatrix, ComplexVector,
    DEFAULT_HERMITIAN_TOL,
};

/// Named configurations far from the optimum, used to exercise error paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegenerateKind {
    /// Canonical observables on `|Ψ⁻⟩` (bias `−2√2`).
    PsiMinus,
    /// Canonical observables on `|Ψ⁺⟩` (bias 0).
    PsiPlus,
    /// Canonical observables on `|Φ⁻⟩` (bias 0).
    PhiMinus,
    /// Canonical Alice, `B0 = B1 = Z`, on `|Φ⁺⟩`.
    EqualBob,
    /// `A_i = B_j = Z` on `|00⟩`.
    Classical,
}

impl DegenerateKind {
    pub const ALL: [DegenerateKind; 5] = [
        DegenerateKind::PsiMinus,
        DegenerateKind::PsiPlus,
        DegenerateKind::PhiMinus,
        DegenerateKind::EqualBob,
        DegenerateKind::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DegenerateKind::PsiMinus => "psi-minus",
            DegenerateKind::PsiPlus => "psi-plus",
            DegenerateKind::PhiMinus => "phi-minus",
            DegenerateKind::EqualBob => "equal-bob",
            DegenerateKind::Classical => "classical",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

/// Recipe for a strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum StrategySpec {
    Canonical,
    Rotated {
        theta_a: f64,
        theta_b: f64,
    },
    Noisy {
        seed: u64,
        magnitude: f64,
    },
    Random {
        dim_a: usize,
        dim_b: usize,
        seed: u64,
    },
    Degenerate(DegenerateKind),
}

impl StrategySpec {
    pub fn build(&self) -> Result<ChshStrategy> {
        match *self {
            StrategySpec::Canonical => Ok(canonical_strategy()),
            StrategySpec::Rotated { theta_a, theta_b } => rotated_strategy(theta_a, theta_b),
            StrategySpec::Noisy { seed, magnitude } => noisy_strategy(seed, magnitude),
            StrategySpec::Random { dim_a, dim_b, seed } => random_strategy(dim_a, dim_b, seed),
            StrategySpec::Degenerate(kind) => degenerate_strategy(kind),
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::Canonical => write!(f, "canonical"),
            StrategySpec::Rotated { theta_a, theta_b } => {
                write!(f, "rotated(theta_a={theta_a}, theta_b={theta_b})")
            }
            StrategySpec::Noisy { seed, magnitude } => {
                write!(f, "noisy(seed={seed}, magnitude={magnitude})")
            }
            StrategySpec::Random { dim_a, dim_b, seed } => {
                write!(f, "random(dims={dim_a}x{dim_b}, seed={seed})")
            }
            StrategySpec::Degenerate(kind) => write!(f, "degenerate:{}", kind.name()),
        }
    }
}

fn build(psi: ComplexVector, obs: [ComplexMatrix; 4]) -> Result<ChshStrategy> {
    let [a0, a1, b0, b1] = obs;
    ChshStrategy::new(psi, a0, a1, b0, b1, OBSERVABLE_TOL)
}

/// `|Φ⁺⟩` with `A0 = Z, A1 = X, B0 = H, B1 = H′`.
pub fn canonical_strategy() -> ChshStrategy {
    build(
        bell_state(BellState::PhiPlus),
        [pauli_z(), pauli_x(), h_observable(), h_prime()],
    )
    .expect("canonical strategy is valid")
}

/// `exp(−iθY/2)`, a real rotation.
pub fn y_rotation(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    let id = ComplexMatrix::identity(2);
    &id.scale_real(c) - &pauli_y().scale(Complex64::new(0.0, s))
}

/// Canonical strategy with Alice's observables conjugated by `exp(−iθ_A Y/2)`
/// and Bob's by `exp(−iθ_B Y/2)`; the state stays `|Φ⁺⟩`.
pub fn rotated_strategy(theta_a: f64, theta_b: f64) -> Result<ChshStrategy> {
    let conj = |u: &ComplexMatrix, m: ComplexMatrix| &(u * &m) * &u.dagger();
    let (ua, ub) = (y_rotation(theta_a), y_rotation(theta_b));
    build(
        bell_state(BellState::PhiPlus),
        [
            conj(&ua, pauli_z()),
            conj(&ua, pauli_x()),
            conj(&ub, h_observable()),
            conj(&ub, h_prime()),
        ],
    )
}

/// Hermitian `(G + G†)/2` with real and imaginary parts of `G` uniform on `[−1, 1]`.
pub fn random_hermitian(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let data = (0..n * n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect();
    hermitian_part(&ComplexMatrix::new(n, n, data).expect("finite entries"))
}

/// Random unit vector from uniform `[−1, 1]` coordinates.
pub fn random_unit_vector(n: usize, rng: &mut impl Rng) -> ComplexVector {
    loop {
        let v = ComplexVector::from_vec(
            (0..n)
                .map(|_| Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
                .collect(),
        );
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            return v.scale_real(1.0 / norm);
        }
    }
}

fn signum_plus(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Binary observable `sign(G)` of a random Hermitian `G` (zero eigenvalues map to +1).
pub fn random_observable(n: usize, rng: &mut impl Rng) -> Result<ComplexMatrix> {
    herm_fun(
        &random_hermitian(n, rng),
        signum_plus,
        DEFAULT_HERMITIAN_TOL,
    )
}

/// Seeded random strategy. Draw order: A0, A1, B0, B1, then ψ.
pub fn random_strategy(dim_a: usize, dim_b: usize, seed: u64) -> Result<ChshStrategy> {
    if dim_a == 0 || dim_b == 0 {
        return Err(LabError::InvalidSpec(format!(
            "dimensions must be positive, got {dim_a}x{dim_b}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a0 = random_observable(dim_a, &mut rng)?;
    let a1 = random_observable(dim_a, &mut rng)?;
    let b0 = random_observable(dim_b, &mut rng)?;
    let b1 = random_observable(dim_b, &mut rng)?;
    let psi = random_unit_vector(dim_a * dim_b, &mut rng);
    build(psi, [a0, a1, b0, b1])
}

/// Canonical strategy perturbed at the given magnitude: each observable becomes
/// `sign(O + magnitude·G)` and the state `normalize(Φ⁺ + magnitude·g)`.
pub fn noisy_strategy(seed: u64, magnitude: f64) -> Result<ChshStrategy> {
    if !(magnitude >= 0.0 && magnitude.is_finite()) {
        return Err(LabError::InvalidSpec(format!(
            "noise magnitude must be >= 0, got {magnitude}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let canonical = [pauli_z(), pauli_x(), h_observable(), h_prime()];
    let mut noisy = Vec::with_capacity(4);
    for o in canonical {
        let g = random_hermitian(2, &mut rng);
        noisy.push(sign_matrix(
            &(&o + &g.scale_real(magnitude)),
            DEFAULT_HERMITIAN_TOL,
        )?);
    }
    let direction = random_unit_vector(4, &mut rng);
    let raw = &bell_state(BellState::PhiPlus) + &direction.scale_real(magnitude);
    let norm = vec_norm(&raw);
    if norm < 1e-12 {
        return Err(LabError::InvalidSpec("noise cancelled the state".into()));
    }
    let obs: [ComplexMatrix; 4] = noisy.try_into().expect("four observables");
    build(raw.scale_real(1.0 / norm), obs)
}

pub fn degenerate_strategy(kind: DegenerateKind) -> Result<ChshStrategy> {
    let canonical = || [pauli_z(), pauli_x(), h_observable(), h_prime()];
    match kind {
        DegenerateKind::PsiMinus => build(bell_state(BellState::PsiMinus), canonical()),
        DegenerateKind::PsiPlus => build(bell_state(BellState::PsiPlus), canonical()),
        DegenerateKind::PhiMinus => build(bell_state(BellState::PhiMinus), canonical()),
        DegenerateKind::EqualBob => build(
            bell_state(BellState::PhiPlus),
            [pauli_z(), pauli_x(), pauli_z(), pauli_z()],
        ),
        DegenerateKind::Classical => build(
            ComplexVector::basis(4, 0),
            [pauli_z(), pauli_z(), pauli_z(), pauli_z()],
        ),
    }
}

/// Bias history of a see-saw run.
#[derive(Debug, Clone, PartialEq)]
pub struct SeesawTrace {
    pub initial_bias: f64,
    /// Bias after each full iteration.
    pub iterations: Vec<f64>,
    /// Bias after every update (state, A0, A1, B0, B1) in order.
    pub half_steps: Vec<f64>,
    pub converged: bool,
    pub final_strategy: ChshStrategy,
}

impl SeesawTrace {
    pub fn final_bias(&self) -> f64 {
        self.iterations.last().copied().unwrap_or(self.initial_bias)
    }

    /// Largest decrease between consecutive recorded biases (0 if monotone).
    pub fn worst_decrease(&self) -> f64 {
        std::iter::once(self.initial_bias)
            .chain(self.half_steps.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| w[0] - w[1])
            .fold(0.0, f64::max)
    }
}

fn observable(m: &ComplexMatrix, name: &str) -> Result<BinaryObservable> {
    BinaryObservable::named(m.clone(), OBSERVABLE_TOL, name)
}

/// Best response to the coefficient matrix `M`: `sign(M)` on the range of `M`.
///
/// Every involution agreeing with `sign(M)` on the range attains the same
/// bias, so on the numerical kernel the update keeps the sign of the previous
/// observable compressed to that kernel (its own zero eigenvalues map to +1).
fn best_response(
    m: &ComplexMatrix,
    previous: &BinaryObservable,
    name: &str,
) -> Result<BinaryObservable> {
    let spec = hermitian_eig(&hermitian_part(m), DEFAULT_HERMITIAN_TOL)?;
    let threshold = kernel_threshold(spec.spectral_radius());
    let n = m.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    let mut kernel = Vec::new();
    for (&lambda, v) in spec.eigenvalues.iter().zip(&spec.eigenvectors) {
        if lambda.abs() <= threshold {
            kernel.push(v.clone());
        } else {
            out = &out + &v.outer(v).scale_real(lambda.signum());
        }
    }
    if !kernel.is_empty() {
        let basis = ComplexMatrix::from_columns(&kernel);
        let compressed = &(&basis.dagger() * previous.matrix()) * &basis;
        let local_sign = sign_matrix(&hermitian_part(&compressed), DEFAULT_HERMITIAN_TOL)?;
        out = &out + &(&(&basis * &local_sign) * &basis.dagger());
    }
    observable(&out, name)
}

/// Alternating maximization of the bias.
///
/// Each iteration sets ψ to the top eigenvector of the CHSH operator, then
/// replaces A0, A1, B0, B1 in turn by the sign of their partial-trace
/// coefficient matrix. Every update is an exact maximization over its own
/// variable, so the bias never decreases. Stops once an iteration gains less
/// than `tol`; `converged` is false if `max_iters` is reached first.
///
/// A degenerate top eigenvalue takes the first eigenvector in the order of
/// [`hermitian_eig`]. Kernel directions of a coefficient matrix keep the
/// previous observable (see `best_response`). Starts holding a scalar
/// observable `±I` have bias at most 2 and can stall there.
pub fn seesaw_optimize(start: &ChshStrategy, max_iters: usize, tol: f64) -> Result<SeesawTrace> {
    let (da, db) = (start.dim_a(), start.dim_b());
    let ia = ComplexMatrix::identity(da);
    let ib = ComplexMatrix::identity(db);
    let [a0, a1, b0, b1] = start.observables().map(Clone::clone);
    let (mut a0, mut a1, mut b0, mut b1) = (a0, a1, b0, b1);
    let mut psi = start.psi().clone();

    let initial_bias = bias(start);
    let mut previous = initial_bias;
    let mut iterations = Vec::new();
    let mut half_steps = Vec::new();
    let mut converged = false;

    let current_bias = |psi: &ComplexVector, obs: [&BinaryObservable; 4]| -> Result<f64> {
        let s = ChshStrategy::from_observables(
            psi.clone(),
            obs[0].clone(),
            obs[1].clone(),
            obs[2].clone(),
            obs[3].clone(),
        )?;
        Ok(bias(&s))
    };

    for _ in 0..max_iters {
        let op = chsh_operator_of(a0.matrix(), a1.matrix(), b0.matrix(), b1.matrix());
        psi = hermitian_eig(&op, DEFAULT_HERMITIAN_TOL)?.eigenvectors[0].clone();
        half_steps.push(current_bias(&psi, [&a0, &a1, &b0, &b1])?);

        let rho = psi.outer(&psi);
        let coeff_a = |bob: &ComplexMatrix| partial_trace_b(&(&kron(&ia, bob) * &rho), da, db);
        a0 = best_response(&coeff_a(&(b0.matrix() + b1.matrix()))?, &a0, "A0")?;
        half_steps.push(current_bias(&psi, [&a0, &a1, &b0, &b1])?);
        a1 = best_response(&coeff_a(&(b0.matrix() - b1.matrix()))?, &a1, "A1")?;
        half_steps.push(current_bias(&psi, [&a0, &a1, &b0, &b1])?);

        let coeff_b = |alice: &ComplexMatrix| partial_trace_a(&(&kron(alice, &ib) * &rho), da, db);
        b0 = best_response(&coeff_b(&(a0.matrix() + a1.matrix()))?, &b0, "B0")?;
        half_steps.push(current_bias(&psi, [&a0, &a1, &b0, &b1])?);
        b1 = best_response(&coeff_b(&(a0.matrix() - a1.matrix()))?, &b1, "B1")?;
        let value = current_bias(&psi, [&a0, &a1, &b0, &b1])?;
        half_steps.push(value);

        iterations.push(value);
        if value - previous < tol {
            converged = true;
            break;
        }
        previous = value;
    }

    let final_strategy = ChshStrategy::from_observables(psi, a0, a1, b0, b1)?;
    Ok(SeesawTrace {
        initial_bias,
        iterations,
        half_steps,
        converged,
        final_strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::TSIRELSON;
    use crate::chsh::{epsilon_deficit, validate_binary_observable};
    use crate::extraction::verify_theorem;

    #[test]
    fn canonical_strategy_is_optimal() {
        let s = canonical_strategy();
        assert_eq!((s.dim_a(), s.dim_b()), (2, 2));
        assert!((bias(&s) - TSIRELSON).abs() < 1e-12);
        assert!(epsilon_deficit(&s) < 1e-12);
    }

    #[test]
    fn zero_rotation_is_canonical() {
        let s = rotated_strategy(0.0, 0.0).unwrap();
        let c = canonical_strategy();
        for (x, y) in s.observables().iter().zip(c.observables()) {
            assert!(x.matrix().max_abs_diff(y.matrix()) < 1e-12);
        }
        assert!(s.psi().max_abs_diff(c.psi()) < 1e-12);
    }

    #[test]
    fn rotated_deficit_is_quadratic() {
        for k in 1..=10 {
            let theta = 0.01 * k as f64;
            let eps = epsilon_deficit(&rotated_strategy(theta, theta).unwrap());
            assert!(eps <= 10.0 * theta * theta, "theta {theta}: eps {eps}");
            // real rotations on both sides leave |Φ⁺⟩ invariant
            assert!(eps < 1e-12, "theta {theta}: eps {eps}");
            let one_sided = epsilon_deficit(&rotated_strategy(theta, 0.0).unwrap());
            let expected = TSIRELSON * (1.0 - theta.cos());
            assert!(
                (one_sided - expected).abs() < 1e-12,
                "theta {theta}: {one_sided} vs {expected}"
            );
        }
    }

    #[test]
    fn rotated_strategy_satisfies_bounds() {
        let report = verify_theorem(&rotated_strategy(0.05, -0.03).unwrap()).unwrap();
        assert!(report.all_satisfied(), "{report}");
    }

    #[test]
    fn random_strategy_is_deterministic_and_valid() {
        let a = random_strategy(3, 2, 11).unwrap();
        let b = random_strategy(3, 2, 11).unwrap();
        assert_eq!(a, b);
        for o in a.observables() {
            assert!(validate_binary_observable(o.matrix(), 1e-9).valid);
        }
        assert_ne!(a, random_strategy(3, 2, 12).unwrap());
        assert!(random_strategy(0, 2, 1).is_err());
    }

    #[test]
    fn noisy_strategy_is_near_canonical() {
        let s = noisy_strategy(4, 0.0).unwrap();
        assert!((bias(&s) - TSIRELSON).abs() < 1e-12);
        let s = noisy_strategy(4, 0.01).unwrap();
        assert!(epsilon_deficit(&s) < 0.1);
        assert!(noisy_strategy(4, -1.0).is_err());
    }

    #[test]
    fn degenerate_names_round_trip() {
        for kind in DegenerateKind::ALL {
            assert_eq!(DegenerateKind::from_name(kind.name()), Some(kind));
            degenerate_strategy(kind).unwrap();
        }
        assert!(DegenerateKind::from_name("nope").is_none());
    }

    #[test]
    fn seesaw_fixed_point() {
        let trace = seesaw_optimize(&canonical_strategy(), 10, 1e-12).unwrap();
        assert!(trace.converged);
        assert_eq!(trace.iterations.len(), 1);
        assert!((trace.final_bias() - TSIRELSON).abs() < 1e-12);
    }

    #[test]
    fn seesaw_from_classical_never_decreases() {
        let start = degenerate_strategy(DegenerateKind::Classical).unwrap();
        let trace = seesaw_optimize(&start, 50, 1e-12).unwrap();
        assert!(trace.final_bias() >= 2.0 - 1e-12);
        assert!(trace.worst_decrease() <= 1e-12);
    }

    #[test]
    fn seesaw_reaches_tsirelson_from_seed_3() {
        let start = random_strategy(2, 2, 3).unwrap();
        let trace = seesaw_optimize(&start, 50, 1e-12).unwrap();
        assert!(
            trace.final_bias() >= TSIRELSON - 1e-6,
            "{:?}",
            trace.iterations
        );
        assert!(trace.worst_decrease() <= 1e-12);
    }

    #[test]
    fn best_response_keeps_previous_on_kernel() {
        let previous = observable(&pauli_x(), "B").unwrap();
        let flat = best_response(&ComplexMatrix::zeros(2, 2), &previous, "B").unwrap();
        assert!(flat.matrix().max_abs_diff(&pauli_x()) < 1e-12);
        // rank one: +1 on the range, previous sign compressed to the kernel
        let rank_one = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, 0.0]);
        let z = observable(&pauli_z(), "B").unwrap();
        let got = best_response(&rank_one, &z, "B").unwrap();
        assert!(got.matrix().max_abs_diff(&pauli_z()) < 1e-12);
        let minus_z = observable(&pauli_z().scale_real(-1.0), "B").unwrap();
        let got = best_response(&rank_one, &minus_z, "B").unwrap();
        assert!(got.matrix().max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        let full = best_response(&pauli_z().scale_real(-3.0), &previous, "B").unwrap();
        assert!(full.matrix().max_abs_diff(&pauli_z().scale_real(-1.0)) < 1e-12);
    }
}
