use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no sign change on [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("no convergence after {iterations} iterations: {detail}")]
    Convergence { iterations: usize, detail: String },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("singular integrand: {0}")]
    SingularIntegrand(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("inconsistent field: {0}")]
    Inconsistent(String),

    #[error("linear solver failed: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
