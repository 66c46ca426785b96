use std::path::PathBuf;

use thiserror::Error;

use crate::fespace::SpaceKind;

/// Errors produced while building, assembling or solving a discretization.
#[derive(Debug, Error)]
pub enum FemError {
    #[error("mesh resolution must be at least 1, got {0}")]
    InvalidResolution(usize),

    #[error("unsupported dimension {0}; expected 2 or 3")]
    UnsupportedDimension(usize),

    #[error("facet {facet:?} is shared by {count} cells")]
    NonManifold { facet: Vec<usize>, count: usize },

    #[error("cell {cell} is degenerate (signed volume {volume:e})")]
    DegenerateCell { cell: usize, volume: f64 },

    #[error("cell {cell} references vertex {vertex} but the mesh has {n_vertices} vertices")]
    VertexOutOfRange {
        cell: usize,
        vertex: usize,
        n_vertices: usize,
    },

    #[error("space {kind:?} is not available in {dim}D")]
    UnsupportedSpace { kind: SpaceKind, dim: usize },

    #[error("point lies outside cell {cell} (barycentric coordinate {min_bary:e})")]
    PointOutsideCell { cell: usize, min_bary: f64 },

    #[error("viscosity must be positive, got {0}")]
    NonPositiveViscosity(f64),

    #[error("spaces are defined on different meshes")]
    MeshMismatch,

    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("vertex block {vertex} is not positive definite")]
    SingularBlock { vertex: usize },

    #[error("sparse factorization failed: {0}")]
    SingularFactorization(String),

    #[error("solver did not reach tolerance {tol:e}; residual history {history:?}")]
    SolverNotConverged { tol: f64, history: Vec<f64> },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("level {level} (n = {n}): {source}")]
    Level {
        level: usize,
        n: usize,
        #[source]
        source: Box<FemError>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl FemError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FemError::Io {
            path: path.into(),
            source,
        }
    }

    /// True when the error originates from the linear solver.
    pub fn is_solver_failure(&self) -> bool {
        match self {
            FemError::SingularFactorization(_)
            | FemError::SolverNotConverged { .. }
            | FemError::SingularBlock { .. } => true,
            FemError::Level { source, .. } => source.is_solver_failure(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, FemError>;
