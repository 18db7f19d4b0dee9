use thiserror::Error;

use crate::config::ConfigError;

/// Failures grouped by process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 3,
        }
    }

    pub fn io(context: impl std::fmt::Display, e: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {e}"))
    }
}

/// Errors raised by the simulator. Parameter problems that validation lets
/// through (odd `N` for parity-restricted references, coordinates out of
/// range) count as configuration errors; the rest are numerical.
impl From<tact_core::Error> for CliError {
    fn from(e: tact_core::Error) -> Self {
        use tact_core::Error as E;
        match e {
            E::InvalidParticleNumber(_) | E::OddParticleNumber { .. } | E::OutOfRange { .. } => {
                CliError::Config(ConfigError::new("", e.to_string()))
            }
            other => CliError::Numerical(other.to_string()),
        }
    }
}
