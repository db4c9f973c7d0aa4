use thiserror::Error;

/// Errors raised by model ingestion and the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("input is not Hermitian: {what} (defect {defect:.3e})")]
    NonHermitianInput { what: String, defect: f64 },

    #[error("{what} has trace {trace:.6e}, expected {expected}")]
    BadTrace {
        what: String,
        trace: f64,
        expected: f64,
    },

    #[error("density matrix has eigenvalue {0:.3e} below the PSD tolerance")]
    NegativeEigenvalue(f64),

    #[error("derivative {index} has kernel-kernel block of norm {norm:.3e}; no SLD exists")]
    InconsistentDerivative { index: usize, norm: f64 },

    #[error("POVM is incomplete: max deviation of sum of elements from identity is {0:.3e}")]
    IncompletePovm(f64),

    #[error("outcome {outcome} is null (p = {prob:.3e}) but has derivative {grad:.3e}")]
    NullOutcomeWithNonzeroDerivative { outcome: usize, prob: f64, grad: f64 },

    #[error("matrix is not traceless (|Tr| = {0:.3e})")]
    NotTraceless(f64),

    #[error("dimension {0} is too small (need d >= 3)")]
    DimensionTooSmall(usize),

    #[error("v.T does not have the rank-one projector spectrum (max gap {0:.3e})")]
    SpectrumMismatch(f64),

    #[error("precondition not met: {0}")]
    PreconditionNotMet(String),

    #[error("construction failed for branch {branch}: {reason}")]
    BranchConstructionFailed { branch: usize, reason: String },

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_) | Error::Io(_) | Error::Json(_) | Error::DimensionMismatch(_) => 2,
            Error::IncompletePovm(_) => 5,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
