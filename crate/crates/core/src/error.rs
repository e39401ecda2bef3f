use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module of the simulator.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A precondition on an argument was violated.
    InvalidArgument(String),
    /// A spin string could not be parsed; `position` is 0-based.
    Parse { position: usize, message: String },
    /// The requested object would exceed a configured size cap.
    Resource(String),
    /// A numerical tolerance could not be met.
    Accuracy(String),
    /// The operation is only defined for periodic spin-1/2 chains.
    UnsupportedLattice(String),
    /// A result that should be exact up to roundoff is not.
    NumericalConsistency(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    pub(crate) fn accuracy(msg: impl Into<String>) -> Self {
        Error::Accuracy(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument(m) => write!(f, "invalid argument: {m}"),
            Error::Parse { position, message } => {
                write!(f, "parse error at position {}: {message}", position + 1)
            }
            Error::Resource(m) => write!(f, "resource limit: {m}"),
            Error::Accuracy(m) => write!(f, "accuracy failure: {m}"),
            Error::UnsupportedLattice(m) => write!(f, "unsupported lattice: {m}"),
            Error::NumericalConsistency(m) => write!(f, "numerical inconsistency: {m}"),
        }
    }
}

impl core::error::Error for Error {}
