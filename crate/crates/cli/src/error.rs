use ricker_core::RickerError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] RickerError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} of {1} criteria failed")]
    VerifyFailed(usize, usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(..) => 1,
            CliError::Core(RickerError::NonFiniteState { .. }) => 3,
            _ => 2,
        }
    }
}
