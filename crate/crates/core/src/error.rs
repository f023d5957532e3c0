use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad caller input: unknown ids, dimension mismatches, out-of-range weights.
    #[error("invalid input: {0}")]
    Input(String),

    /// A domain invariant does not hold (empty or unbounded set, missing bbox, ...).
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("no path from {from} to {to}")]
    NoPath { from: usize, to: usize },

    #[error("instance too large for the oracle: more than {cap} paths")]
    TooLarge { cap: usize },

    #[error("optimality gap undefined for lower bound {0}")]
    UndefinedGap(f64),

    /// The solver produced something the algorithm's own guarantees rule out,
    /// usually a tolerance misconfiguration.
    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("conic backend failure: {0}")]
    Numerical(String),

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }
}
