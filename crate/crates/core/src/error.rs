use thiserror::Error;

use crate::steady_state::MeanFieldState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("mean-field solver did not converge after {iterations} iterations (residual {residual:e})")]
    SolverFailure {
        iterations: usize,
        residual: f64,
        best: Box<MeanFieldState>,
    },

    #[error("drift matrix is not stable (max Re eigenvalue {margin:e} rad/s)")]
    Unstable { margin: f64 },

    #[error("ill-conditioned linear system: {0}")]
    Conditioning(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("transient integration failed: {0}")]
    Integration(String),

    #[error("covariance matrix is unphysical (min symplectic eigenvalue {nu_min})")]
    Unphysical { nu_min: f64 },

    #[error("at grid point {index:?}: {source}")]
    AtPoint {
        index: (usize, usize),
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Strips grid-point context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            e => e,
        }
    }
}
