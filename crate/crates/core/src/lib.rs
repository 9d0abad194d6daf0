//! Spectral simulation of the barotropic vorticity equation on a rotating
//! sphere, with exact triad coupling coefficients and diagnostics for the
//! strong-rotation (zonalizing) limit.

pub mod cli;
pub mod diagnostics;
pub mod error;
pub mod operators;
pub mod solver;
pub mod spharm;
pub mod triads;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};
pub use operators::OperatorContext;
pub use solver::{Solver, SolverConfig};
pub use spharm::{SpectralField, WaveVector};
pub use triads::TriadTable;
