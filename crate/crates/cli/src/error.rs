use std::fmt;

use bplab_core::BpError;

/// Exit status of a failed command.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input files.
    Usage(String),
    /// The solver or a tracer produced non-finite or unstable output.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) => f.write_str(m),
        }
    }
}

impl From<BpError> for CliError {
    fn from(e: BpError) -> Self {
        match e {
            BpError::NonFinite { .. } | BpError::UnstableStep { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(format!("i/o error: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
