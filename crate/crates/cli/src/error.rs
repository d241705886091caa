use std::fmt;

use sonarsim_core::SonarError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Io(m) => write!(f, "io error: {m}"),
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
        }
    }
}

impl From<SonarError> for CliError {
    fn from(e: SonarError) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Io(e.to_string())
        }
    }
}
