use thiserror::Error;

/// Errors raised by core types and problem oracles.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },
    #[error("invalid simplex weights: {reason}")]
    InvalidAlpha { reason: String },
    #[error("oracle failure: {0}")]
    Oracle(String),
}

impl CoreError {
    pub fn dim(context: &'static str, expected: usize, got: usize) -> Self {
        CoreError::DimensionMismatch {
            context,
            expected,
            got,
        }
    }
}
