use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },

    #[error(transparent)]
    Core(#[from] mixkt::Error),
}

impl CliError {
    /// 1 for failed verification, 2 for usage or input errors, 3 for a size-guard refusal.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse { .. } => 2,
            CliError::Core(mixkt::Error::CapacityExceeded { .. }) => 3,
            CliError::Core(mixkt::Error::CertificationFailed { .. } | mixkt::Error::Lp(_)) => 1,
            CliError::Core(_) => 2,
        }
    }
}
