//! Closed-form solutions, samplers and numerical oracles connecting the
//! porous medium equation, the Euler–Poisson–Darboux equation, random
//! flights, fractional EPD equations and higher-order pseudoprocesses.

pub mod analytic;
pub mod checks;
pub mod error;
pub mod flights;
pub mod fracepd;
pub mod levy;
pub mod pmefd;
pub mod pseudo;
pub mod quad;
pub mod rng;
pub mod specfun;
pub mod stats;

pub use error::{Error, Result};
