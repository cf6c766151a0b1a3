use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config key `{key}`: {msg}")]
    Config { key: String, msg: String },
    #[error("{0}")]
    Io(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] idform_core::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    /// Process exit code: 1 for bad input, 3 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Parse { .. } => 1,
            CliError::Core(idform_core::Error::InvalidParameter { .. }) => 1,
            _ => 3,
        }
    }
}
