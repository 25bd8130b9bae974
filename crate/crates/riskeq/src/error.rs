//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("arithmetic mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("exact root unavailable: {0}")]
    InexactRoot(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid game: {0}")]
    InvalidGame(String),
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("unsupported valuation: {0}")]
    UnsupportedValuation(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
