use thiserror::Error;

/// Errors raised while building meshes, element kernels, or solving.
#[derive(Debug, Error)]
pub enum VemError {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("element {element}: degenerate polygon (area {area:e} <= {threshold:e})")]
    DegenerateElement { element: usize, area: f64, threshold: f64 },

    #[error("element {element}: polygon is not simple")]
    SelfIntersecting { element: usize },

    #[error("element {element}: not star-shaped with respect to its centroid")]
    NotStarShaped { element: usize },

    #[error("zero-length edge between ({r1}, {z1}) and ({r2}, {z2})")]
    ZeroLengthEdge { r1: f64, z1: f64, r2: f64, z2: f64 },

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("invalid boundary condition: {0}")]
    InvalidBoundaryCondition(String),

    #[error("singular strain-stress system while building B")]
    SingularConstitutive,

    #[error(
        "system is singular or indefinite at dof {dof} (node {node}, {component}); pivot {pivot:e}. \
         Missing axial constraint?"
    )]
    SingularSystem {
        dof: usize,
        node: usize,
        component: &'static str,
        pivot: f64,
    },

    #[error("iterative solver did not converge: {iterations} iterations, relative residual {residual:e}")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("invalid study: {0}")]
    InvalidStudy(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, VemError>;
