use std::fmt;
use std::process::ExitCode;

use stm::StmError;

/// Failure categories, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or hyperparameters (exit 2).
    Usage(String),
    /// Unreadable or inconsistent input files (exit 3).
    Data(String),
    /// A trained model broke one of its own invariants (exit 4).
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Internal(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<StmError> for CliError {
    fn from(e: StmError) -> Self {
        match e {
            StmError::Config(_) | StmError::SingleClass => CliError::Usage(e.to_string()),
            StmError::StateOutOfSpectrum { .. } | StmError::LiteralNotPresent(_) => CliError::Internal(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Prefixes a data error with the file it came from.
pub fn in_file<T, E: Into<CliError>>(r: Result<T, E>, path: &std::path::Path) -> CliResult<T> {
    r.map_err(|e| match e.into() {
        CliError::Data(m) => CliError::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}
