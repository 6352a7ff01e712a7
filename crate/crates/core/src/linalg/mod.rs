//! Dense complex linear algebra at the small dimensions the lab works in.

mod eig;
mod matrix;

pub use eig::{
    check_hermitian, fix_phase, herm_fun, hermitian_eig, hermitian_part, hermiticity_residual,
    kernel_threshold, mat_op_norm, sign_matrix, SpectralDecomposition, DEFAULT_HERMITIAN_TOL,
    PHASE_EPS, TIE_TOL,
};
pub use matrix::{ComplexMatrix, ComplexVector, I, ONE, ZERO};
pub use num_complex::Complex64;

use crate::error::{dim_mismatch, Result};

/// Kronecker product; entry `(iA·rB + iB, jA·cB + jB)` is `A[iA,jA]·B[iB,jB]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca, rb, cb) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for ia in 0..ra {
        for ja in 0..ca {
            let s = a[(ia, ja)];
            if s == ZERO {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    out[(ia * rb + ib, ja * cb + jb)] = s * b[(ib, jb)];
                }
            }
        }
    }
    out
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

pub fn vec_norm(v: &ComplexVector) -> f64 {
    v.norm_sqr().sqrt()
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner(u: &ComplexVector, v: &ComplexVector) -> Result<Complex64> {
    if u.dim() != v.dim() {
        return Err(dim_mismatch(u.dim(), v.dim()));
    }
    Ok(u.dot(v))
}

/// Real part of `⟨v|M|v⟩`.
pub fn expectation(m: &ComplexMatrix, v: &ComplexVector) -> f64 {
    v.dot(&m.apply(v)).re
}

fn check_bipartite(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    let n = dim_a * dim_b;
    if dim_a == 0 || dim_b == 0 || m.rows() != n || m.cols() != n {
        return Err(dim_mismatch(
            format!("{n}x{n} ({dim_a}*{dim_b})"),
            format!("{}x{}", m.rows(), m.cols()),
        ));
    }
    Ok(())
}

/// Traces out the right tensor factor of a `(dim_a·dim_b)`-square matrix.
pub fn partial_trace_b(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, dim_a, dim_b)?;
    let mut out = ComplexMatrix::zeros(dim_a, dim_a);
    for i in 0..dim_a {
        for j in 0..dim_a {
            out[(i, j)] = (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum();
        }
    }
    Ok(out)
}

/// Traces out the left tensor factor of a `(dim_a·dim_b)`-square matrix.
pub fn partial_trace_a(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<ComplexMatrix> {
    check_bipartite(m, dim_a, dim_b)?;
    let mut out = ComplexMatrix::zeros(dim_b, dim_b);
    for k in 0..dim_b {
        for l in 0..dim_b {
            out[(k, l)] = (0..dim_a).map(|i| m[(i * dim_b + k, i * dim_b + l)]).sum();
        }
    }
    Ok(out)
}
