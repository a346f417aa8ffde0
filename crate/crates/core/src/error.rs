use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A dense construction would exceed the size guard.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Non-finite values appeared during a computation. `step` is set when the
    /// failure happened inside a time-stepping loop.
    #[error("numeric failure{}: {message}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    Numeric { step: Option<usize>, message: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The requested basis state cannot be produced by a single bit flip
    /// within the available layers.
    #[error("basis state {target} is not reachable with a single bit flip in {layers} layers")]
    Unreachable { target: u64, layers: usize },

    /// The steady-state system has no unique solution.
    #[error("singular system: {0}")]
    Singular(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn numeric(msg: impl Into<String>) -> Error {
    Error::Numeric {
        step: None,
        message: msg.into(),
    }
}
