use thiserror::Error;

/// Errors raised while building, evaluating, or checking a problem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("configuration error: {0}")]
    Config(String),

    /// The mapping produced a NaN or infinity.
    #[error("evaluation produced a non-finite value at coordinate {coordinate}")]
    NonFinite { coordinate: usize },

    /// Exhaustive enumeration was requested on a matrix that is too large.
    #[error(
        "dimension {m} exceeds the enumeration budget of {limit}; use the sampled oracle instead"
    )]
    Budget { m: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
