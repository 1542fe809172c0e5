use thiserror::Error;

/// Errors raised by matchkit operations.
///
/// Every variant maps to a stable machine-readable code (see [`Error::code`]),
/// which the CLI embeds in its JSON error output.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("size cap exceeded: {0}")]
    CapExceeded(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("attempted to invert zero")]
    ZeroInverse,

    #[error("family of {members} proper subspaces cannot cover a space over a field of order {q}; need at most {q} members")]
    CoveringBound { members: usize, q: u64 },

    #[error("family of {members} subspaces exceeds the field order {q}; the greedy trivial-intersection construction needs #family <= q")]
    TrivialIntersectorBound { members: usize, q: u64 },

    #[error("input is not in reduced row echelon form; canonical form is {suggestion}")]
    NotRref { suggestion: String },

    #[error("intersection property violated at index set {violator:?}")]
    PropertyViolated { violator: Vec<usize> },

    #[error("internal invariant broken: {0}")]
    InternalTheoremViolation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Structural(_) => "STRUCTURAL",
            Error::Precondition(_) => "PRECONDITION",
            Error::CapExceeded(_) => "CAP_EXCEEDED",
            Error::NotPrime(_) => "NOT_PRIME",
            Error::ZeroInverse => "ZERO_INVERSE",
            Error::CoveringBound { .. } => "COVERING_BOUND",
            Error::TrivialIntersectorBound { .. } => "THEOREM2_BOUND",
            Error::NotRref { .. } => "NOT_RREF",
            Error::PropertyViolated { .. } => "PROPERTY_VIOLATED",
            Error::InternalTheoremViolation(_) => "INTERNAL_THEOREM_VIOLATION",
            Error::Parse(_) => "PARSE",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::InternalTheoremViolation(msg.into())
}
