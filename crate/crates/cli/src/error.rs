use cartierkit::Error;

/// Parse errors.
pub const EXIT_PARSE: i32 = 2;
/// Ring, prime or length mismatch.
pub const EXIT_MISMATCH: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;
/// Any other failure, including a failing verify suite.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_PARSE,
            CliError::Core(e) => match e {
                Error::Parse(_) => EXIT_PARSE,
                Error::RingMismatch(_) | Error::PrimeMismatch(..) | Error::LengthUnderflow(_) => EXIT_MISMATCH,
                Error::UnsupportedRepresentation(_) | Error::UnsupportedBase(_) => EXIT_UNSUPPORTED,
                _ => EXIT_FAILURE,
            },
            CliError::Io(_) => EXIT_FAILURE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
