use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet must have at least 2 states, got {0}")]
    AlphabetTooSmall(usize),
    #[error("state {state} at position {position} is outside the alphabet of size {size}")]
    StateOutOfRange {
        position: usize,
        state: usize,
        size: usize,
    },
    #[error("{what}: {value} is out of range {range}")]
    Range {
        what: &'static str,
        value: String,
        range: String,
    },
    #[error("dimension mismatch: {what} expected {expected}, got {actual}")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("empirical frequencies are undefined at t = 1 (empty history)")]
    UndefinedHistory,
    #[error("invalid dither schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid loss: {0}")]
    InvalidLoss(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn range_err(what: &'static str, value: impl ToString, range: impl ToString) -> Error {
    Error::Range {
        what,
        value: value.to_string(),
        range: range.to_string(),
    }
}
