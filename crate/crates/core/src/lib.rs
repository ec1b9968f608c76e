//! Abelian Higgs vortices on the round two-sphere, the Kähler geometry of
//! their moduli space, and zeta-regularised Quillen determinant checks.

pub mod embedding_checks;
pub mod error;
pub mod harmonics;
pub mod moduli_metric;
pub mod quillen_spectral;
pub mod sphere_geometry;
pub mod vortex_solver;

pub use error::{Error, Result};
