use thiserror::Error;

/// Error taxonomy shared by every module.
///
/// `Inconsistency` is reserved for outcomes that would contradict a proved
/// statement (the CLI maps it to a distinct exit code so CI can alarm on it).
#[derive(Debug, Error)]
pub enum CoreError {
    /// Input outside the domain of an operation (zero vector, x = 0, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition does not hold (guards of the theorems, tangent
    /// conditions, degenerate exponents).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A computation finished but its outcome contradicts a proved lemma.
    #[error("inconsistency: {0}")]
    Inconsistency(String),

    /// The request is outside the implemented scope (non-toric subgroup
    /// descriptors, ...).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A rigorous answer could not be produced (truncation tails, interval
    /// overlap that survives refinement).
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// Internal invariant broke; must not happen on valid inputs.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
