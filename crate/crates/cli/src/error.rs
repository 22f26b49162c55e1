use std::fmt;
use std::io;
use std::path::PathBuf;

#[derive(Debug)]
pub enum CliError {
    /// Malformed config file, flag or parameter combination.
    Config(String),
    Io {
        path: PathBuf,
        source: io::Error,
    },
    Model(qillum_core::Error),
}

impl CliError {
    /// 2 for configuration and IO failures, 3 for numerical non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(e) if e.is_numerical() => 3,
            _ => 2,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Model(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qillum_core::Error> for CliError {
    fn from(e: qillum_core::Error) -> Self {
        CliError::Model(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
