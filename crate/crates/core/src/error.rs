use thiserror::Error;

use crate::properties::Defect;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("width mismatch: expected {expected} bits, found {found}")]
    WidthMismatch { expected: usize, found: usize },

    #[error("width {width} out of range (1..={max})")]
    WidthOutOfRange { width: usize, max: usize },

    #[error("value {bits:#b} does not fit in {width} bits")]
    ValueTooWide { bits: u32, width: usize },

    #[error("bad bit character {ch:?} at position {pos} in {text:?}")]
    BadBit { text: String, pos: usize, ch: char },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed lasso: {0}")]
    MalformedLasso(String),

    #[error("malformed walk: {0}")]
    MalformedWalk(String),

    #[error("resource limit exceeded: {what} is {found}, limit {limit}")]
    ResourceLimit {
        what: &'static str,
        found: usize,
        limit: usize,
    },

    #[error("model: {0}")]
    Model(String),

    #[error("expression: {message} at position {pos}")]
    Expression { message: String, pos: usize },

    #[error(transparent)]
    Defect(#[from] Box<Defect>),
}

impl Error {
    /// Whether this error reports a violated law rather than bad input.
    pub fn is_defect(&self) -> bool {
        matches!(self, Error::Defect(_))
    }
}
