use thiserror::Error;

/// Errors raised by the library. Each variant corresponds to one contract
/// failure class: malformed input, violated precondition, unsupported size,
/// numerical breakdown, or a point leaving a kernel's domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("capability exceeded: {0}")]
    Capability(String),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error("domain error: {0}")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}

pub(crate) fn check_dims(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected != got {
        return input(format!("{what}: dimension mismatch (expected {expected}, got {got})"));
    }
    Ok(())
}
