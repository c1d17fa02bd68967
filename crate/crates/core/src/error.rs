use thiserror::Error;

/// Errors raised by the group, metric, cocycle, boundary and crossed-product layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or out-of-domain input: unknown symbols, bad constants, mixed groups.
    #[error("input error: {0}")]
    Input(String),

    /// A desk-scale resource cap was hit, or a query fell outside a truncation window.
    #[error("resource error: {0}")]
    Resource(String),

    /// An iterative solver failed to converge or produced degenerate data.
    #[error("numeric error: {0}")]
    Numeric(String),

    /// A structural invariant failed while building a certificate.
    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    /// The operation is not available for this kind of group or element.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
