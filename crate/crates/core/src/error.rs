use thiserror::Error;

/// Errors produced anywhere in the witness pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{n_qubits} qubits exceeds the dense-matrix cap of {cap}")]
    CapExceeded { n_qubits: usize, cap: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("state is not normalized (norm^2 = {0})")]
    Unnormalized(f64),

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("training diverged at epoch {epoch}: rms {rms:.4e} vs initial {initial_rms:.4e}")]
    Diverged {
        epoch: usize,
        rms: f64,
        initial_rms: f64,
        /// Lowest-error schedule seen before the abort.
        last_good: Box<crate::Schedule>,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
