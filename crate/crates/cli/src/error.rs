use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {key}: {reason}")]
    Config { key: String, reason: String },
    #[error("numerical failure: {0}")]
    Numerical(#[from] qfl_core::Error),
    #[error("cannot write {path}: {source}")]
    Output { path: PathBuf, source: std::io::Error },
    #[error("cannot read {path}: {source}")]
    Input { path: PathBuf, source: std::io::Error },
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Config { key: key.into(), reason: reason.into() }
    }

    /// 2 for configuration problems, 3 for numerical or IO failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config { .. } | Self::Input { .. } => 2,
            Self::Numerical(_) | Self::Output { .. } | Self::Verify(_) => 3,
        }
    }
}

impl From<&CliError> for ExitCode {
    fn from(e: &CliError) -> Self {
        ExitCode::from(e.exit_code())
    }
}
