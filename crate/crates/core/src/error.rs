use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    /// The dual Newton solver failed on every rung of the regularization ladder.
    #[error("optimization failed after {iterations} iterations (last regularization {regularization})")]
    OptimizationFailure {
        iterations: usize,
        regularization: f64,
        last_iterate: Vec<f64>,
    },

    /// The flux Jacobian could not be decomposed (Hessian not positive definite).
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("limiter failure: {0}")]
    LimiterFailure(String),

    /// A time step could not be completed; carries the offending cell and its moments.
    #[error("fatal step error in cell {cell} at t = {time}: {reason}")]
    StepFailure {
        cell: usize,
        time: f64,
        reason: String,
        moments: Vec<f64>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
