//! Assembled Stokes discretization on one mesh and the three ways of
//! solving it: the exact three-field method, the augmented system with the
//! quadrature mass assembled monolithically, and the multipoint vorticity
//! method (reduced solve plus local reconstruction).

use std::sync::Arc;

use crate::assembly::{
    assemble_curl, assemble_div, assemble_exact_vorticity_mass, assemble_quadrature_vorticity_mass,
    assemble_rhs, LoadData, RhsVectors, VertexBlockMatrix,
};
use crate::error::Result;
use crate::fespace::{FeSpace, SpaceKind};
use crate::hybridization::{build_reduced_system, invert_vertex_blocks, reconstruct_vorticity};
use crate::mesh::SimplicialMesh;
use crate::solver::{solve_saddle, SaddleSystem};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Three-field method with the exact vorticity mass.
    ThreeField,
    /// Multipoint vorticity method: vertex quadrature plus local elimination.
    Multipoint,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ThreeField => "3F",
            Method::Multipoint => "MV",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "3f" | "3f-mfem" | "three-field" => Ok(Method::ThreeField),
            "mv" | "mv-mfem" | "multipoint" => Ok(Method::Multipoint),
            other => Err(format!("unknown method '{other}' (expected mv or 3f)")),
        }
    }
}

/// Discrete solution triple.
#[derive(Debug, Clone)]
pub struct Solution {
    pub r: Vec<f64>,
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    /// Unknowns in the linear system that was factorized.
    pub n_dof: usize,
    pub residual: f64,
}

/// All operators of the discretization on one mesh.
#[derive(Debug, Clone)]
pub struct StokesProblem {
    pub mesh: Arc<SimplicialMesh>,
    pub space_r: FeSpace,
    pub space_q: FeSpace,
    pub space_p: FeSpace,
    pub mu: f64,
    pub a: SparseMatrix,
    pub a_h: VertexBlockMatrix,
    pub b_r: SparseMatrix,
    pub b_q: SparseMatrix,
}

impl StokesProblem {
    pub fn new(mesh: Arc<SimplicialMesh>, mu: f64) -> Result<Self> {
        let space_r = FeSpace::vorticity(mesh.clone())?;
        let space_q = FeSpace::new(mesh.clone(), SpaceKind::RT0)?;
        let space_p = FeSpace::new(mesh.clone(), SpaceKind::P0)?;
        let a = assemble_exact_vorticity_mass(&space_r, mu)?;
        let a_h = assemble_quadrature_vorticity_mass(&space_r, mu)?;
        let b_r = assemble_curl(&space_r, &space_q)?;
        let b_q = assemble_div(&space_q, &space_p)?;
        Ok(StokesProblem {
            mesh,
            space_r,
            space_q,
            space_p,
            mu,
            a,
            a_h,
            b_r,
            b_q,
        })
    }

    pub fn load(&self, data: &LoadData<'_>) -> Result<RhsVectors> {
        assemble_rhs(data, &self.space_r, &self.space_q)
    }

    fn flags(&self) -> Vec<bool> {
        let mut f = self.space_r.essential().to_vec();
        f.extend_from_slice(self.space_q.essential());
        f.extend_from_slice(self.space_p.essential());
        f
    }

    fn has_essential(&self) -> bool {
        self.space_r.essential().iter().any(|&b| b) || self.space_q.essential().iter().any(|&b| b)
    }

    fn solve_monolithic(&self, a: &SparseMatrix, rhs: &RhsVectors, tol: f64) -> Result<Solution> {
        let mut sys = SaddleSystem::three_field(a, &self.b_r, &self.b_q, rhs)?;
        if self.has_essential() {
            sys = sys.with_essential(&self.flags())?;
        }
        let out = solve_saddle(&sys, tol)?;
        Ok(Solution {
            r: sys.block(&out.x, 0).to_vec(),
            q: sys.block(&out.x, 1).to_vec(),
            p: sys.block(&out.x, 2).to_vec(),
            n_dof: sys.dim(),
            residual: out.residual,
        })
    }

    /// Three-field method with the exact vorticity mass.
    pub fn solve_three_field(&self, rhs: &RhsVectors, tol: f64) -> Result<Solution> {
        self.solve_monolithic(&self.a, rhs, tol)
    }

    /// Augmented system with the quadrature mass, solved without elimination.
    pub fn solve_augmented(&self, rhs: &RhsVectors, tol: f64) -> Result<Solution> {
        self.solve_monolithic(&self.a_h.to_sparse(), rhs, tol)
    }

    /// Multipoint vorticity method.
    pub fn solve_multipoint(&self, rhs: &RhsVectors, tol: f64) -> Result<Solution> {
        let r_flags = self.space_r.essential();
        let q_flags = self.space_q.essential();
        let (a_h, b_r, rhs) = if self.has_essential() {
            let mut rhs = rhs.clone();
            for (v, &f) in rhs.f_r.iter_mut().zip(r_flags) {
                if f {
                    *v = 0.0;
                }
            }
            (
                self.a_h.constrain(r_flags),
                self.b_r.zero_columns(r_flags),
                rhs,
            )
        } else {
            (self.a_h.clone(), self.b_r.clone(), rhs.clone())
        };
        let a_h_inv = invert_vertex_blocks(&a_h)?;
        let reduced = build_reduced_system(&b_r, &self.b_q, &a_h_inv, &rhs)?;
        let mut sys = SaddleSystem::reduced(&reduced)?;
        if self.has_essential() {
            let mut flags = q_flags.to_vec();
            flags.extend_from_slice(self.space_p.essential());
            sys = sys.with_essential(&flags)?;
        }
        let out = solve_saddle(&sys, tol)?;
        let q = sys.block(&out.x, 0).to_vec();
        let p = sys.block(&out.x, 1).to_vec();
        let r = reconstruct_vorticity(&a_h_inv, &b_r, &rhs.f_r, &q);
        Ok(Solution {
            r,
            q,
            p,
            n_dof: sys.dim(),
            residual: out.residual,
        })
    }

    pub fn solve(&self, method: Method, rhs: &RhsVectors, tol: f64) -> Result<Solution> {
        match method {
            Method::ThreeField => self.solve_three_field(rhs, tol),
            Method::Multipoint => self.solve_multipoint(rhs, tol),
        }
    }
}
