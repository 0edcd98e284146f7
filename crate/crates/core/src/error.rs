use thiserror::Error;

/// Errors raised by the numeric core, the condition and bound evaluators and
/// the verification harness.
///
/// `Degenerate` is kept apart from `Domain`: it marks an instance that lies on
/// the degenerate locus of its problem (singular matrix, multiple root, ...),
/// which callers usually want to skip rather than report as a failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate instance: {0}")]
    Degenerate(String),

    #[error("lambda not an eigenvalue: {0}")]
    NotAnEigenvalue(String),

    #[error("inconclusive at {precision_bits} bits: {reason}")]
    Inconclusive { precision_bits: usize, reason: String },

    #[error("precision ceiling of {max_bits} bits reached: {reason}")]
    PrecisionExhausted { max_bits: usize, reason: String },

    #[error("bit budget exceeded: {needed} bits needed, budget is {budget}; lower k or raise the budget")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("root recovery failed: {0}")]
    Recovery(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("verification failure: {witness}")]
    Verification { witness: String },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn inconclusive(precision_bits: usize, reason: impl Into<String>) -> Self {
        Error::Inconclusive {
            precision_bits,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
