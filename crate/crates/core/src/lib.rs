//! Boundary integral solver for time-harmonic scattering by a locally
//! perturbed periodic surface, truncated vertically by a PML and laterally by
//! Neumann-to-Dirichlet maps of the two semi-infinite periodic waveguides.

pub mod dense;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod ntd;
pub mod pml;
pub mod quadrature;
pub mod scattering;
pub mod special;

pub use error::{Error, Result};
