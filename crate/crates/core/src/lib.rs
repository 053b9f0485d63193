//! Pseudo-spectral simulation and verification tools for the compressible
//! Navier–Stokes–Korteweg system in momentum form.

pub mod data;
pub mod decay;
pub mod error;
pub mod experiment;
pub mod linear;
pub mod littlewood_paley;
pub mod quadrature;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
