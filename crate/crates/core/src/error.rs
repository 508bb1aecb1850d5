use thiserror::Error;

/// Errors raised by the simulator, the channel models and the training loop.
#[derive(Debug, Error, Clone)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid qubit target: {0}")]
    InvalidTarget(String),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("training diverged at turn {turn}: non-finite score")]
    Diverged {
        turn: usize,
        log: Box<crate::game::TrainingLog>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
