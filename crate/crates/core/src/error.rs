//! Unified error type for all fallible operations in the crate.

use alloc::string::String;
use core::fmt;

/// Errors reported by constructors and numerical routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument violates the mathematical domain of the operation
    /// (negative mass, negative time, energy below zero, ...).
    Domain(String),
    /// An argument is mathematically admissible but outside the range in
    /// which the result is representable or accurate in double precision
    /// (e.g. `exp(x^2)` overflow guards).
    Range(String),
    /// Two objects that must live on the same grid (or have matching
    /// lengths) do not.
    Mismatch(String),
    /// An iterative routine exhausted its budget before reaching the
    /// requested tolerance.
    Convergence(String),
}

impl Error {
    /// Domain error with the given message.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Range error with the given message.
    pub fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }

    /// Grid/length mismatch error with the given message.
    pub fn mismatch(msg: impl Into<String>) -> Self {
        Error::Mismatch(msg.into())
    }

    /// Convergence failure with the given message.
    pub fn convergence(msg: impl Into<String>) -> Self {
        Error::Convergence(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Range(msg) => write!(f, "range error: {msg}"),
            Error::Mismatch(msg) => write!(f, "mismatch: {msg}"),
            Error::Convergence(msg) => write!(f, "convergence failure: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
