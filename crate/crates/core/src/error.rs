use thiserror::Error;

use crate::{copulas::CopulaError, dependence::DependenceError, fitting::FitError, jointroc::RocError, marginals::MarginalError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error; every module error converts into it.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Marginal(#[from] MarginalError),
    #[error(transparent)]
    Copula(#[from] CopulaError),
    #[error(transparent)]
    Dependence(#[from] DependenceError),
    #[error(transparent)]
    Roc(#[from] RocError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

impl Error {
    /// True when the failure is numerical (non-convergence, overshoot) rather
    /// than a bad input.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::Copula(e) => e.is_numeric(),
            Error::Dependence(e) => e.is_numeric(),
            Error::Roc(RocError::Copula(e)) => e.is_numeric(),
            Error::Fit(e) => e.is_numeric(),
            _ => false,
        }
    }
}
