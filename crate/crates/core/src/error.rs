use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: ‖H − H†‖_F = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error(
        "positivity lost at t = {t}: minimum eigenvalue {min_eigenvalue:.3e} with step {step:.3e}; \
         reduce the step size"
    )]
    PositivityViolation { t: f64, min_eigenvalue: f64, step: f64 },

    #[error("steady state is not unique: generator kernel has dimension {kernel_dim}")]
    DegenerateKernel { kernel_dim: usize },

    #[error("linear system is singular")]
    Singular,

    #[error("decay fit rejected: {0}")]
    Fit(String),

    #[error("invalid measurement: {0}")]
    InvalidPovm(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
