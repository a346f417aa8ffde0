use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error{}: {message}", key.as_ref().map(|k| format!(" in '{k}'")).unwrap_or_default())]
    Config { key: Option<String>, message: String },

    #[error("numeric failure{}: {message}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    Numeric { step: Option<usize>, message: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Core(vqspde::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numeric { .. } => 3,
            CliError::Io(_) | CliError::Core(_) => 1,
        }
    }
}

impl From<vqspde::Error> for CliError {
    fn from(e: vqspde::Error) -> Self {
        match e {
            vqspde::Error::Numeric { step, message } => CliError::Numeric { step, message },
            vqspde::Error::Singular(message) => CliError::Numeric { step: None, message },
            other => CliError::Core(other),
        }
    }
}
