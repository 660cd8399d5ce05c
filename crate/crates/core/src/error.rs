//! Error vocabulary shared by the solvers and the problem generators.

use alloc::string::String;
use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong inside the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Vector or matrix dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An argument violates a documented precondition (non-finite values,
    /// out-of-range parameters, oversized oracle instances).
    #[error("invalid input: {0}")]
    Input(String),

    /// A numeric kernel failed, e.g. a Cholesky pivot that is not positive.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The active set became empty; callers treat this as converged-to-zero.
    #[error("degenerate state: active set is empty")]
    DegenerateState,
}
