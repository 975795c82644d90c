use thiserror::Error;

/// Errors raised by parsers, constructions and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },

    #[error("constraint {constraint}: assignment arity {found}, context has {expected} variables")]
    Arity {
        constraint: usize,
        expected: usize,
        found: usize,
    },

    #[error("distribution weights sum to {sum}, expected 1")]
    WeightSum { sum: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("{what} needs {needed}, above the size cap {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },

    #[error("graph is not regular")]
    NotRegular,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("degenerate graph: {0}")]
    Degenerate(String),

    #[error("no graph with lambda >= {lambda_min} after {attempts} attempts (best {best})")]
    AttemptCap {
        lambda_min: f64,
        attempts: usize,
        best: f64,
    },

    #[error("missing graph for size {0} in the replacement family")]
    MissingGraph(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("incompatible question pair: {0}")]
    IncompatibleQuestions(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        msg: msg.into(),
    }
}
