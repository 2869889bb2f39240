//! Pseudospectral laboratory for a fractal-regularized Boussinesq system.

pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod experiments;
pub mod io;
pub mod lp;
pub mod num_serde;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
