use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The instance itself is malformed (bad index, out-of-range value).
    #[error("invalid instance: {0}")]
    Instance(String),

    /// A caller-supplied argument violates an operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// An enumeration or computation would exceed its configured budget.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A component returned something that breaks its own contract,
    /// e.g. a sink rule producing a non-distribution.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
