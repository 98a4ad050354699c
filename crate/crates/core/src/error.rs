use thiserror::Error;

use crate::convex_opt::LowerBoundResult;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("unsupported dimension {dim}: {reason}")]
    UnsupportedDimension { dim: usize, reason: &'static str },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("oracle failure: {0}")]
    OracleFailure(String),

    #[error("oracle contract violated: {0}")]
    OracleContractViolation(String),

    #[error("no termination within budget after {} oracle calls", partial.oracle_calls)]
    NonTermination { partial: Box<LowerBoundResult> },

    #[error("iteration budget of {budget} attempts exhausted")]
    IterationBudget { budget: usize },

    #[error("bound violated: {0}")]
    AssertionFailure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
