use thiserror::Error;

use crate::dynamics::Trajectory;
use crate::lie::GroupId;

/// Errors raised by the library. Every variant is recoverable by the caller.
#[derive(Debug, Error)]
pub enum Error {
    #[error("group mismatch: {left:?} vs {right:?}")]
    GroupMismatch { left: GroupId, right: GroupId },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported problem: {0}")]
    Unsupported(String),

    #[error("singular operator: {0}")]
    Singular(String),

    #[error("group constraint violated (residual {residual:e})")]
    ConstraintViolation { residual: f64 },

    #[error("invalid configuration for `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    /// Integration left the finite region. `partial` holds every sample
    /// computed before the escape.
    #[error("trajectory diverged after t = {last_time}, estimated escape time {escape_time}")]
    Divergence {
        last_time: f64,
        escape_time: f64,
        partial: Box<Trajectory>,
    },

    #[error("closed-form solution has a pole at t = {time}")]
    Pole { time: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}
