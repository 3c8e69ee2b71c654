use magnon_entangle::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{0}")]
    Core(#[from] CoreError),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("cannot write {path}: {source}")]
    Output {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// 2 for anything the user can fix in the inputs, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Output { .. } => 2,
            CliError::Core(e) => match e {
                CoreError::Domain(_)
                | CoreError::UnsupportedConfiguration(_)
                | CoreError::OutOfRegion { .. } => 2,
                _ => 3,
            },
            CliError::Numerical(_) => 3,
        }
    }
}
