//! Mixed finite elements for Stokes flow in vorticity–velocity–pressure
//! form on simplicial meshes, with a multipoint variant that eliminates the
//! vorticity locally through a vertex quadrature rule.

pub mod assembly;
pub mod error;
pub mod fespace;
pub mod hybridization;
pub mod mesh;
pub mod mms;
pub mod problem;
pub mod quadrature;
pub mod report;
pub mod solver;
pub mod sparse;
pub mod study;
pub mod vtk;

pub use error::{FemError, Result};
pub use fespace::{DofVector, FeSpace, SpaceKind};
pub use mesh::{BoundaryTag, SimplicialMesh};
pub use mms::{exact_fields, AnalyticField, ExactSolution, FnField};
pub use problem::{Method, Solution, StokesProblem};
pub use report::{emit_report, parse_csv, ReportFormat};
pub use study::{run_convergence, ConvergenceReport, StudyConfig};
