use std::io;

/// Errors surfaced by the command-line front end, each with an exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("spec error: {0}")]
    Spec(String),
    #[error(transparent)]
    Engine(#[from] rgsec_core::Error),
    #[error("numeric overflow: {0}")]
    Overflow(String),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{failed} check(s) failed")]
    VerifyFailed { failed: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Engine(rgsec_core::Error::PairingViolated(_)) => 3,
            CliError::Overflow(_) => 4,
            CliError::Spec(_) | CliError::Engine(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<toml::de::Error> for CliError {
    fn from(e: toml::de::Error) -> Self {
        CliError::Spec(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Spec(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
