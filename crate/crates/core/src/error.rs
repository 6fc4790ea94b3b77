use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range (limit {limit})")]
    OutOfRange { index: u64, limit: u64 },

    #[error("resource limit exceeded: {what} = {requested} > cap {cap}")]
    ResourceLimit {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("integer overflow computing {0}")]
    Overflow(&'static str),

    #[error("payload does not match space: {0}")]
    PayloadMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("construction failed after {attempts} attempts (best attempt left {best_uncovered} classes uncovered, allowed {allowed})")]
    AttemptsExhausted {
        attempts: u32,
        best_uncovered: u64,
        allowed: u64,
    },
}
