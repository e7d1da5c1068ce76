//! Meshes, basis families, quadrature, projections and banded solves.

pub mod banded;
pub mod mesh;
pub mod projection;
pub mod quadrature;
pub mod space;

pub use banded::{BandedCholesky, BandedSymMatrix, DiagonalMatrix};
pub use mesh::Mesh;
pub use projection::{assemble_gram, assemble_weighted, l2_project, l2_project_with, lump_mass, CoefficientVector};
pub use quadrature::QuadratureRule;
pub use space::{Family, FunctionSpace, Tabulation, Trace};
