//! Periodic lattice, unitary transforms and Fourier multipliers.

mod field;
mod grid;
pub mod ops;
mod transform;

pub use field::{PhysicalField, SpectralField};
pub use grid::{Grid, GridSpec};
pub use transform::SpectralTransform;
