use thiserror::Error;

/// Errors produced by domain validation and the numeric solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument fell outside its mathematical domain.
    #[error("{name} = {value} is outside {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A structured parameter failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A bracketing solver was handed an interval without a sign change.
    #[error("no sign change on [{lo}, {hi}] while solving {what}")]
    NoBracket {
        what: &'static str,
        lo: f64,
        hi: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
