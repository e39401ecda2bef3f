use std::fmt;

use xxz_floquet::Error;

/// Failure of a command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Accuracy(String),
    Resource(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Accuracy(_) => 3,
            CliError::Resource(_) => 4,
            CliError::Io(_) => 1,
        }
    }

    /// Prefixes the message with the config key it concerns.
    pub fn at(key: &str, err: Error) -> Self {
        match CliError::from(err) {
            CliError::Config(m) => CliError::Config(format!("{key}: {m}")),
            other => other,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Accuracy(m) => write!(f, "{m}"),
            CliError::Resource(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::InvalidArgument(_) | Error::Parse { .. } | Error::UnsupportedLattice(_) => {
                CliError::Config(err.to_string())
            }
            Error::Accuracy(_) | Error::NumericalConsistency(_) => CliError::Accuracy(format!(
                "{err}; try a larger evolve.steps_per_period or evolve.krylov_dim"
            )),
            Error::Resource(_) => CliError::Resource(err.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
