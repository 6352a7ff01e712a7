//! Numerical laboratory for robust CHSH rigidity.
//!
//! Builds the local extraction isometries for arbitrary finite-dimensional
//! CHSH strategies, measures how far a strategy is from the canonical EPR
//! strategy, and checks each inequality of the rigidity bound chain.

pub mod error;
pub mod linalg;

pub use error::{LabError, Result};
pub mod canonical;
pub mod chsh;
pub mod extraction;
pub mod gap;
pub mod strategies;
