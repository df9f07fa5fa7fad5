use hyperalg::HvError;

/// Failure of one CLI invocation; the variant decides the exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Invalid flags or configuration file. Exit code 2.
    #[error("{0}")]
    Config(String),
    /// Failure while running or writing results. Exit code 1.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<HvError> for CliError {
    fn from(e: HvError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
