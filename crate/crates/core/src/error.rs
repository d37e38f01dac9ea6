use thiserror::Error;

/// Errors produced by the coherence calculator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A spectrum, sequence, trap or run parameter violates its contract.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A printed closed-form filter function is singular at the requested point.
    #[error("closed-form filter is singular at x = {x}")]
    SingularPoint { x: f64 },

    /// The quadrature ran out of its evaluation budget before meeting the tolerance.
    #[error(
        "quadrature did not converge: estimated relative error {relative_error:.3e} after {evaluations} evaluations"
    )]
    QuadratureBudget { relative_error: f64, evaluations: usize },

    /// Time step too coarse for the noise band or the pulse schedule.
    #[error("time step {dt} s is too coarse: {reason}")]
    TimeStep { dt: f64, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
