use thiserror::Error;

/// Errors produced by the varifold toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate frame: numerical rank {rank} < {expected}")]
    DegenerateFrame { rank: usize, expected: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("empty cell: all weights are zero")]
    EmptyCell,

    #[error("empty varifold: {0}")]
    EmptyVarifold(String),

    #[error("empty restriction: no atom strictly inside the box")]
    EmptyRestriction,

    #[error("atom {index} at {position:?} lies outside the grid")]
    AtomOutsideGrid { index: usize, position: Vec<f64> },

    #[error("atom {index} lies outside the domain")]
    AtomOutsideDomain { index: usize },

    #[error("no local data: moment matrix vanishes at the evaluation point")]
    NoLocalData,

    #[error("unsupported dimensions (d={d}, n={n}) for {what}")]
    Unsupported { d: usize, n: usize, what: &'static str },

    #[error("no valid (center, radius) pair for density estimation")]
    NoValidDensitySample,

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
