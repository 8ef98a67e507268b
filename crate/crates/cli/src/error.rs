use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0} value(s) did not converge (--strict)")]
    NotConverged(usize),

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Numeric(#[from] felkit::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::NotConverged(_) => 3,
            Self::Io(_) => 4,
            Self::Numeric(felkit::Error::Domain { .. } | felkit::Error::InvalidInput(_)) => 2,
            Self::Numeric(_) => 1,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
