//! Crate-wide error type.

/// Errors produced by this crate.
///
/// The CLI maps variants to exit codes: `Domain` -> 2 (usage),
/// `Data` -> 3, `Io` -> 3, `Numeric` -> 4. A failed verification check is
/// not an error; it is reported through the suite result and exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A precondition on an argument or configuration value was violated.
    #[error("domain error: {0}")]
    Domain(String),
    /// An input file or dataset cell could not be used.
    #[error("data error: {0}")]
    Data(String),
    /// A computation left the representable range or failed to converge.
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
