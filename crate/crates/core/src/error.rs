use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate layout: antennas {i} and {j} are {distance:.3e} m apart")]
    DegenerateLayout { i: usize, j: usize, distance: f64 },

    #[error("singular matrix (condition estimate {condition:.3e})")]
    SingularMatrix { condition: f64 },

    #[error("eigenvalues too close: {0}; perturb the spectrum before calling")]
    Degeneracy(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("target irregularity {target} not reached; best found {best}")]
    ConvergenceFailure { target: f64, best: f64 },

    #[error("channel rank deficient in {attempts} consecutive draws")]
    SingularChannel { attempts: usize },
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
