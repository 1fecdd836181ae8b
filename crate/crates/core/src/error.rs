use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("eigensolver did not converge for a {size}x{size} matrix within {max_iterations} sweeps")]
    EigenNonConvergence { size: usize, max_iterations: usize },

    #[error("Picard iteration did not converge at t = {time} after {iterations} iterations (last contraction factor {last_factor:.3e})")]
    PicardNonConvergence {
        time: f64,
        iterations: usize,
        last_factor: f64,
    },

    #[error("quadrature truncation not converged (relative change {relative_change:.3e}); try radius {suggested_radius}")]
    Truncation {
        relative_change: f64,
        suggested_radius: f64,
    },

    #[error("cache format error: {0}")]
    Cache(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
