use thiserror::Error;

/// Errors raised by evaluators, samplers and solvers in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("gamma function pole at {0}")]
    Pole(f64),

    #[error("invalid flight specification: {0}")]
    InvalidSpec(String),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Quadrature { estimate: f64, tolerance: f64 },

    #[error("point ({0}) is on or outside the free boundary")]
    OutsideSupport(String),

    #[error("CFL violation: time step {dt:e} exceeds the stability bound {bound:e}")]
    Cfl { dt: f64, bound: f64 },

    #[error("SDE path left the support by {excess:e}, more than one mesh width ({mesh:e})")]
    SdeInstability { excess: f64, mesh: f64 },

    #[error("grid is not uniform: spacing deviates by {0:e}")]
    NonUniformGrid(f64),

    #[error("invalid samples: {0}")]
    InvalidSamples(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
