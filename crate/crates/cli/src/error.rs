use thiserror::Error;

/// Failures that end a command with a non-verdict exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("invalid state: {0}")]
    Invalid(String),

    #[error("cannot write {path}: {reason}")]
    Unwritable { path: String, reason: String },

    #[error("corrupt certificate: {0}")]
    CorruptCertificate(String),

    #[error("method unavailable: {0}")]
    Unavailable(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("internal failure: {0}")]
    Internal(String),
}

/// Stable exit codes. Verdicts use 0..=2.
pub mod exit {
    pub const EXTENDIBLE: i32 = 0;
    pub const NOT_EXTENDIBLE: i32 = 1;
    pub const UNDECIDED: i32 = 2;
    pub const MALFORMED: i32 = 3;
    pub const INVALID: i32 = 4;
    pub const UNWRITABLE: i32 = 5;
    pub const CORRUPT_CERTIFICATE: i32 = 6;
    pub const UNAVAILABLE: i32 = 7;
    pub const USAGE: i32 = 8;
    pub const INTERNAL: i32 = 9;
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => exit::MALFORMED,
            CliError::Invalid(_) => exit::INVALID,
            CliError::Unwritable { .. } => exit::UNWRITABLE,
            CliError::CorruptCertificate(_) => exit::CORRUPT_CERTIFICATE,
            CliError::Unavailable(_) => exit::UNAVAILABLE,
            CliError::Usage(_) => exit::USAGE,
            CliError::Internal(_) => exit::INTERNAL,
        }
    }
}

impl From<symext::Error> for CliError {
    fn from(e: symext::Error) -> Self {
        use symext::Error as E;
        match e {
            E::ConvergenceFailure { .. } | E::NumericalFailure(_) | E::DimensionTooLarge { .. } => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
