//! Error type shared by the algebra modules.

use alloc::string::String;
use core::fmt;

/// Errors surfaced by the exact-arithmetic and verification layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Operands live over different variable sets or truncation bounds.
    CtxMismatch(String),
    /// An element required to be invertible is not (zero constant term,
    /// zero numerator, vanishing denominator factor after substitution).
    NonInvertible(String),
    /// A q-series parameter makes a required Pochhammer denominator vanish.
    SingularParameter(String),
    /// Invalid configuration (orders, parameter domains, unknown ids).
    Config(String),
    /// An operation left the representable domain (e.g. merging the two
    /// legs of a Cartan exponential symbol).
    Unsupported(String),
    /// A difference system failed to close at the reported order.
    Inconsistent(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CtxMismatch(s) => write!(f, "context mismatch: {s}"),
            Error::NonInvertible(s) => write!(f, "non-invertible: {s}"),
            Error::SingularParameter(s) => write!(f, "singular parameter: {s}"),
            Error::Config(s) => write!(f, "configuration error: {s}"),
            Error::Unsupported(s) => write!(f, "unsupported operation: {s}"),
            Error::Inconsistent(s) => write!(f, "inconsistent system: {s}"),
        }
    }
}

impl core::error::Error for Error {}
