use std::process::ExitCode;

use lipm_gait::GaitError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Solver(String),

    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 2 validation, 3 solver, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn into_exit_code(self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }

    pub fn io(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Io(format!("{context}: {err}"))
    }
}

impl From<GaitError> for CliError {
    fn from(e: GaitError) -> Self {
        match e {
            GaitError::SolverFailure { .. } => CliError::Solver(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
