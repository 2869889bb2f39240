//! Periodic grids, spectral fields and Fourier multipliers.

mod field;
mod grid;
mod multiplier;
mod random;

pub use field::SpectralField;
pub use grid::Grid;
pub use multiplier::MultiplierSpec;
pub use random::{random_field, RandomFieldSpec};
