//! Hermitian eigendecomposition by cyclic complex Jacobi rotations, plus the
//! matrix functions and norms built on top of it.

use std::cmp::Ordering;

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ComplexVector, ZERO};
use crate::error::{dim_mismatch, LabError, Result};

/// Relative Hermiticity tolerance used when callers have no better value.
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues closer than this (relative to `max(1, ‖M‖)`) count as a tie.
pub const TIE_TOL: f64 = 1e-10;

/// Entries at or below this modulus are skipped when fixing eigenvector phases.
pub const PHASE_EPS: f64 = 1e-12;

const MAX_SWEEPS: usize = 64;
// Off-diagonal Frobenius norm accepted as converged, per unit of `n · ‖M‖_F`.
const OFF_DIAGONAL_TOL: f64 = 4.0 * f64::EPSILON;
// Once rounding noise dominates, a sweep that fails to halve `off` ends the
// iteration as long as `off` is already below this relative level.
const STAGNATION_TOL: f64 = 1e-11;

/// Eigenpairs of a Hermitian matrix, eigenvalues non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<ComplexVector>,
}

impl SpectralDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `Σ f(λ_k) v_k v_k†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvectors[0].dim();
        let mut out = ComplexMatrix::zeros(n, n);
        for (&lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            let w = f(lambda);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v[i] * w;
                for j in 0..n {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }

    /// Largest eigenvalue modulus.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |acc, x| acc.max(x.abs()))
    }
}

/// Frobenius distance between `m` and its adjoint.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    assert!(m.is_square());
    let n = m.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            acc += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Checks `‖M − M†‖_F ≤ tol · max(1, ‖M‖_F)`.
pub fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    if !m.is_square() {
        return Err(dim_mismatch(
            "square matrix",
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    let residual = hermiticity_residual(m);
    let scale = m.frobenius_norm().max(1.0);
    if residual > tol * scale {
        return Err(LabError::NotHermitian {
            residual,
            tol: tol * scale,
        });
    }
    Ok(())
}

/// Returns `(M + M†)/2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + &m.dagger()).scale_real(0.5)
}

/// Multiplies `v` by the unit phase making its first entry of modulus
/// above [`PHASE_EPS`] real positive.
pub fn fix_phase(v: &ComplexVector) -> ComplexVector {
    match v.iter().find(|z| z.norm() > PHASE_EPS) {
        Some(z) => v.scale(z.conj() / z.norm()),
        None => v.clone(),
    }
}

/// Deterministic eigendecomposition of a Hermitian matrix.
///
/// The input is symmetrized before the iteration so the rotations see an
/// exactly Hermitian matrix. Eigenvectors are phase-fixed and ties are broken
/// by a descending lexicographic order of their `(re, im)` entries.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition> {
    check_hermitian(m, tol)?;
    let n = m.rows();
    let mut a = hermitian_part(m);
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    let mut converged = scale == 0.0;
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a);
    while !converged {
        if off <= OFF_DIAGONAL_TOL * n as f64 * scale {
            converged = true;
            break;
        }
        if sweeps == MAX_SWEEPS {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        let previous = off;
        off = off_diagonal_norm(&a);
        if off > 0.5 * previous && off <= STAGNATION_TOL * scale {
            converged = true;
        }
    }
    if !converged {
        return Err(LabError::NoConvergence {
            sweeps,
            off_norm: off,
        });
    }

    let mut pairs: Vec<(f64, ComplexVector)> = (0..n)
        .map(|k| (a[(k, k)].re, fix_phase(&v.column(k))))
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));

    let norm = pairs.iter().fold(0.0f64, |acc, p| acc.max(p.0.abs()));
    let tie = TIE_TOL * norm.max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end - 1].0 - pairs[end].0 <= tie {
            end += 1;
        }
        if end - start > 1 {
            let group = &mut pairs[start..end];
            let mut values: Vec<f64> = group.iter().map(|p| p.0).collect();
            group.sort_by(|x, y| lex_cmp(&y.1, &x.1));
            values.sort_by(|x, y| y.total_cmp(x));
            for (p, val) in group.iter_mut().zip(values) {
                p.0 = val;
            }
        }
        start = end;
    }

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One unitary rotation in the (p, q) plane annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let modulus = b.norm();
    if modulus == 0.0 {
        return;
    }
    let phase = b.conj() / modulus;
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * modulus);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_qp = -phase * s;
    let g_qq = phase * c;
    let n = a.rows();
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * c + akq * g_qp;
        a[(k, q)] = akp * s + akq * g_qq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = apk * c + aqk * g_qp.conj();
        a[(q, k)] = apk * s + aqk * g_qq.conj();
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * c + vkq * g_qp;
        v[(k, q)] = vkp * s + vkq * g_qq;
    }
}

fn lex_key(x: f64) -> f64 {
    // Snap to a 1e-12 grid so rounding noise does not decide the order.
    (x * 1e12).round()
}

fn lex_cmp(u: &ComplexVector, w: &ComplexVector) -> Ordering {
    for (a, b) in u.iter().zip(w.iter()) {
        let ord = lex_key(a.re)
            .total_cmp(&lex_key(b.re))
            .then(lex_key(a.im).total_cmp(&lex_key(b.im)));
        if ord != Ordering::Equal {
            return ord;
        }
    }
    Ordering::Equal
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn herm_fun(m: &ComplexMatrix, f: impl Fn(f64) -> f64, tol: f64) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(m, tol)?.reconstruct_with(f))
}

/// Sign of a Hermitian matrix, acting as `+1` on the numerical kernel.
///
/// Eigenvalues with `|λ| ≤ 1e-10 · max(1, ‖M‖)` are treated as zero.
pub fn sign_matrix(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(m, tol)?;
    let threshold = kernel_threshold(spec.spectral_radius());
    Ok(spec.reconstruct_with(|x| {
        if x.abs() <= threshold {
            1.0
        } else {
            x.signum()
        }
    }))
}

pub fn kernel_threshold(norm: f64) -> f64 {
    1e-10 * norm.max(1.0)
}

/// Operator (spectral) norm: square root of the top eigenvalue of `M†M`
/// (or `MM†` when that is the smaller Gram matrix).
pub fn mat_op_norm(m: &ComplexMatrix) -> Result<f64> {
    let gram = if m.rows() < m.cols() {
        m * &m.dagger()
    } else {
        &m.dagger() * m
    };
    let spec = hermitian_eig(&gram, DEFAULT_HERMITIAN_TOL)?;
    Ok(spec.eigenvalues[0].max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{I, ONE};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    #[test]
    fn eig_of_z() {
        let s = hermitian_eig(&z(), DEFAULT_HERMITIAN_TOL).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, -1.0]);
        assert_eq!(s.eigenvectors[0], ComplexVector::basis(2, 0));
        assert_eq!(s.eigenvectors[1], ComplexVector::basis(2, 1));
    }

    #[test]
    fn eig_of_x() {
        let s = hermitian_eig(&x(), DEFAULT_HERMITIAN_TOL).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-15);
        let plus = ComplexVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let minus = ComplexVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
        assert!(s.eigenvectors[0].max_abs_diff(&plus) < 1e-15);
        assert!(s.eigenvectors[1].max_abs_diff(&minus) < 1e-15);
    }

    #[test]
    fn complex_entries_converge() {
        // Y = [[0, -i], [i, 0]] has eigenvectors (1, ±i)/√2.
        let y = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
        let s = hermitian_eig(&y, DEFAULT_HERMITIAN_TOL).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-15);
        let top = ComplexVector::from_vec(vec![ONE * FRAC_1_SQRT_2, I * FRAC_1_SQRT_2]);
        assert!(s.eigenvectors[0].max_abs_diff(&top) < 1e-15);
        assert!(s.reconstruct().max_abs_diff(&y) < 1e-15);
    }

    #[test]
    fn identity_tie_order_is_standard_basis() {
        let s = hermitian_eig(&ComplexMatrix::identity(3), DEFAULT_HERMITIAN_TOL).unwrap();
        for k in 0..3 {
            assert_eq!(s.eigenvectors[k], ComplexVector::basis(3, k));
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = ComplexMatrix::zeros(2, 2);
        m[(0, 1)] = ONE;
        assert!(matches!(
            hermitian_eig(&m, DEFAULT_HERMITIAN_TOL),
            Err(LabError::NotHermitian { .. })
        ));
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::zeros(2, 3), DEFAULT_HERMITIAN_TOL),
            Err(LabError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn herm_fun_examples() {
        let abs = |v: f64| v.abs();
        assert_eq!(
            herm_fun(&z(), abs, 1e-9).unwrap(),
            ComplexMatrix::identity(2)
        );
        assert_eq!(
            herm_fun(&z().scale_real(2.0), abs, 1e-9).unwrap(),
            ComplexMatrix::identity(2).scale_real(2.0)
        );
        let id = ComplexMatrix::identity(2);
        assert_eq!(herm_fun(&id, |v| v * v, 1e-9).unwrap(), id);
    }

    #[test]
    fn zero_matrix_decomposes() {
        let s = hermitian_eig(&ComplexMatrix::zeros(2, 2), 1e-9).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0, 0.0]);
        assert_eq!(
            sign_matrix(&ComplexMatrix::zeros(2, 2), 1e-9).unwrap(),
            ComplexMatrix::identity(2)
        );
    }

    #[test]
    fn op_norm_of_rectangular() {
        let m = ComplexMatrix::from_real(2, 3, &[3.0, 0.0, 0.0, 0.0, 4.0, 0.0]);
        assert!((mat_op_norm(&m).unwrap() - 4.0).abs() < 1e-14);
        assert!((mat_op_norm(&m.dagger()).unwrap() - 4.0).abs() < 1e-14);
    }
}
