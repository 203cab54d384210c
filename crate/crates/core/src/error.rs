use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A computation would exceed a configured size cap.
    #[error("{what} = {requested} exceeds the cap of {cap} (override with {flag})")]
    ResourceLimit { what: &'static str, requested: u64, cap: u64, flag: &'static str },
    #[error("argument {value} is outside the prime table (limit {limit}; raise it with --limit)")]
    OutOfTable { value: u64, limit: u64 },
    #[error("element {value} is outside [1, {n}]")]
    OutOfRange { value: u64, n: u64 },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
