use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Points from incompatible models (e.g. different Euclidean dimensions).
    #[error("points belong to different space models: {0}")]
    ModelMismatch(String),

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    /// A precondition on numeric input was violated.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("cannot parse scalar from {0:?}")]
    ParseScalar(String),

    #[error("operation not supported by this space model: {0}")]
    Unsupported(&'static str),

    #[error("{location}: {message}")]
    Format { location: String, message: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse_scalar(text: &str) -> Self {
        Error::ParseScalar(text.to_string())
    }

    pub fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            location: location.into(),
            message: message.into(),
        }
    }
}
