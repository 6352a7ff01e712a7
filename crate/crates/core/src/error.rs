use thiserror::Error;

use crate::chsh::ValidationReport;

/// Errors raised across the lab.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum LabError {
    #[error("matrix is not Hermitian: residual {residual:e} exceeds tolerance {tol:e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("non-finite entry in {what}")]
    NonFinite { what: &'static str },

    #[error("observable {name} is not a binary observable ({report})")]
    InvalidObservable {
        name: String,
        report: ValidationReport,
    },

    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("junk state undefined: squared norm of the Phi+ block is {projection_sq_norm:e}")]
    DegenerateJunk { projection_sq_norm: f64 },

    #[error("invalid strategy specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

pub(crate) fn dim_mismatch(expected: impl ToString, found: impl ToString) -> LabError {
    LabError::DimensionMismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
