//! Modified Galerkin finite element solver for the one-dimensional
//! Serre-Green-Naghdi equations with reflective (wall) boundaries.

pub mod assembly;
pub mod bathymetry;
pub mod convergence;
pub mod diagnostics;
pub mod error;
pub mod fem;
pub mod integrator;
pub mod scenarios;

pub use assembly::{AssemblyContext, ContextOptions, Curvature, Forcing, SgnState};
pub use bathymetry::{Bathymetry, DiscreteBathymetry, Preset, SinusoidReading};
pub use error::{Result, SgnError};
