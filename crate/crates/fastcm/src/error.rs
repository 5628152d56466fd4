//! Crate-wide error type.

/// Errors shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An internal invariant was violated; indicates a caller-supplied
    /// bound that does not actually bound the target quantity.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    /// A text input could not be parsed. Line numbers are 1-based.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A pipeline step required a converged fit and did not get one.
    /// The solvers themselves report non-convergence in the
    /// [`FitReport`](crate::inference::FitReport) instead of erroring.
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
