//! Error types shared by every module of the crate.

use thiserror::Error;

/// Errors produced by the construction and verification pipelines.
#[derive(Debug, Clone, Error)]
pub enum RysError {
    /// Parameter outside the admissible domain (λ ≤ −1/2, z < 0, odd moment
    /// index, non-positive log-gamma argument, |x| ≥ 1 for a series that
    /// requires |x| < 1, and similar contract violations).
    #[error("domain error: {0}")]
    Domain(String),

    /// An index does not fit the table or window it was asked of.
    #[error("index out of range: {0}")]
    IndexRange(String),

    /// The Hankel/Cholesky factorization hit a non-positive pivot: the
    /// requested table length cannot be certified at the working precision.
    /// Raise the digit count and retry.
    #[error("precision exhausted at row {index}: Hankel pivot not positive at the working precision")]
    PrecisionExhausted { index: usize },

    /// The independent integration oracle failed to converge under level
    /// doubling; its result must not be trusted.
    #[error("oracle divergence: {0}")]
    OracleDivergence(String),

    /// An iteration (series summation, eigensolver sweep) exceeded its hard
    /// cap without meeting the convergence criterion.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// Evaluation or propagation hit a singular point (vanishing ladder
    /// coefficient, coincident charges, vanishing propagation factor).
    #[error("singular configuration: {0}")]
    Singular(String),

    /// A flow integration step produced an invalid state; retry with more,
    /// smaller steps.
    #[error("step size too large: {0}")]
    StepSize(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, RysError>;
