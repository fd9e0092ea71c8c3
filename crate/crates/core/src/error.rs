use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the documented domain of an operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The model cannot provide a sampler the caller asked for.
    #[error("unsupported capability: {0}")]
    Unsupported(String),

    /// Level or stick index past what was sampled.
    #[error("index {index} out of range (max {max}) in {op}")]
    Index { op: &'static str, index: usize, max: usize },

    /// Inputs that should line up (skeleton vs. interval records) do not.
    #[error("structural mismatch: {0}")]
    Structure(String),

    #[error("invalid parameter {name}: {detail}")]
    InvalidParam { name: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        op,
        detail: detail.into(),
    }
}

pub(crate) fn invalid(name: &'static str, detail: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        detail: detail.into(),
    }
}
