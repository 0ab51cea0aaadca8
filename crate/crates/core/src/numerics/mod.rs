//! Dense numerical kernels used by the bias geometry and the debiasers.
//!
//! Everything here works in `f64` on small dense matrices (`D ≤ ~1000`).

mod eigen;
mod optimize;
mod ridge;

use thiserror::Error;

pub use eigen::{pca, principal_axes, sym_eig, Pca, SymEigResult};
pub use optimize::{grad_check, minimize, FnObjective, Minimum, Objective, OptimizerConfig, Projection};
pub use ridge::ridge_solve;

#[derive(Debug, Error, PartialEq)]
pub enum NumericsError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("linear system is singular")]
    Singular,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("non-finite objective or gradient at iteration {iteration}")]
    NonFinite { iteration: usize },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
