//! First-order virtual element method for axisymmetric linear elasticity.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod element;
pub mod error;
pub mod loads;
pub mod material;
pub mod mesh;
pub mod meshfile;
pub mod quadrature;
pub mod verify;

pub use assembly::{AnalysisOptions, GlobalSystem, Problem, SolveReport, SolverKind};
pub use element::{ElementKernels, ElementOptions, ProjectionVariant, ProjectorKind};
pub use error::{Result, VemError};
pub use loads::{DirichletSpec, DofComponent, Traction, TractionSpec};
pub use material::{ConstitutiveMatrix, Material, Strain, StrainComponent, Stress};
pub use mesh::{ElementGeometry, PolyMesh, Vertex};
