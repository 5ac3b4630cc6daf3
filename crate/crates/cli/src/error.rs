use std::io;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid `{field}`: {reason}")]
    Config { field: &'static str, reason: String },
    #[error(transparent)]
    Core(#[from] mesodist::Error),
    #[error("cannot write `{}`: {source}", path.display())]
    Output { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn config(field: &'static str, reason: impl Into<String>) -> Self {
        CliError::Config {
            field,
            reason: reason.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Output { .. } => 2,
            CliError::Core(e) if e.is_config() => 2,
            CliError::Core(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
