use std::fmt;

/// Failures split by exit status: bad input exits with 2, anything that
/// goes wrong while computing exits with 1.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

impl From<sinkmech::Error> for CliError {
    fn from(e: sinkmech::Error) -> Self {
        use sinkmech::Error::*;
        match e {
            Instance(_) | Argument(_) | Parse { .. } => CliError::Invalid(e.to_string()),
            Resource(_) | Contract(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<sinkmech_amd::Error> for CliError {
    fn from(e: sinkmech_amd::Error) -> Self {
        use sinkmech_amd::Error::*;
        match e {
            Core(inner) => inner.into(),
            Argument(_) | Parse { .. } => CliError::Invalid(e.to_string()),
            Infeasible(_) | Unbounded(_) | Resource(_) | Contract(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<sinkmech_experiments::Error> for CliError {
    fn from(e: sinkmech_experiments::Error) -> Self {
        use sinkmech_experiments::Error::*;
        match e {
            Core(inner) => inner.into(),
            Argument(_) | Parse { .. } => CliError::Invalid(e.to_string()),
            Io { .. } | Data(_) => CliError::Runtime(e.to_string()),
        }
    }
}
