use thiserror::Error;

/// Errors raised by the library. Argument errors are precondition
/// violations on the caller's side; the remaining variants are runtime
/// failures of an otherwise valid request.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum HeisError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient tail data: {exits} uncensored exits in fit window, need at least {required}")]
    InsufficientTailData { exits: u64, required: u64 },

    #[error("horizon too short: survival at t_max = {t_max} is {survival:.4}, fit window needs survival <= {needed}")]
    HorizonTooShort { t_max: f64, survival: f64, needed: f64 },

    #[error("degenerate regression design: {0}")]
    DegenerateDesign(String),
}

impl HeisError {
    /// True for errors caused by bad caller input rather than by the data.
    pub fn is_usage(&self) -> bool {
        matches!(self, HeisError::InvalidArgument(_))
    }
}

pub type Result<T> = std::result::Result<T, HeisError>;

pub(crate) fn invalid(msg: impl Into<String>) -> HeisError {
    HeisError::InvalidArgument(msg.into())
}
