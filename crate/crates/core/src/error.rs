use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A checked integer operation left the 64-bit range.
    #[error("numeric overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A table key violates `I ⊆ X`, the size bounds, or names a phantom element.
    #[error("invalid key: {0}")]
    InvalidKey(String),

    /// The requested instance is larger than the documented desk-scale limit.
    #[error("scale guard exceeded: {0}")]
    ScaleGuard(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
