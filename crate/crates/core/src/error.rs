use alloc::string::String;
use core::fmt;

/// Errors produced by estimation, scoring and simulation routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An input violated a documented precondition.
    InvalidArgument(String),
    /// The requested quantity is not identifiable from the given input.
    Unidentifiable(String),
    /// A numerical operation failed (singular system, failed factorization).
    Numerical(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(msg) => write!(f, "invalid argument: {msg}"),
            Error::Unidentifiable(msg) => write!(f, "unidentifiable: {msg}"),
            Error::Numerical(msg) => write!(f, "numerical failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
