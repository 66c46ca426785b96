//! Bilinear forms and load functionals of the vorticity–velocity–pressure
//! weak form, and the vertex-quadrature vorticity mass matrix.
//!
//! Orientation convention: `B_r` maps vorticity dofs to velocity
//! functionals (rows = velocity dofs), `B_q` maps velocity dofs to pressure
//! functionals (rows = cells). Adjoints are plain transposes.

use nalgebra::DMatrix;

use crate::error::{FemError, Result};
use crate::fespace::{point_from_bary, FeSpace, SpaceKind};
use crate::mesh::{cross, dot, BoundaryTag};
use crate::mms::AnalyticField;
use crate::quadrature::SimplexRule;
use crate::sparse::SparseMatrix;

/// Dense per-vertex blocks of a block-diagonal vorticity operator.
#[derive(Debug, Clone)]
pub struct VertexBlock {
    pub vertex: usize,
    /// Global vorticity dofs owned by `vertex`, ascending.
    pub dofs: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

/// Block-diagonal operator with one dense block per mesh vertex.
#[derive(Debug, Clone)]
pub struct VertexBlockMatrix {
    n_dofs: usize,
    blocks: Vec<VertexBlock>,
}

impl VertexBlockMatrix {
    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn blocks(&self) -> &[VertexBlock] {
        &self.blocks
    }

    pub(crate) fn from_blocks(n_dofs: usize, blocks: Vec<VertexBlock>) -> Self {
        VertexBlockMatrix { n_dofs, blocks }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_dofs);
        let mut y = vec![0.0; self.n_dofs];
        for b in &self.blocks {
            for (i, &gi) in b.dofs.iter().enumerate() {
                y[gi] = b
                    .dofs
                    .iter()
                    .enumerate()
                    .map(|(j, &gj)| b.matrix[(i, j)] * x[gj])
                    .sum();
            }
        }
        y
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        let mut t = Vec::new();
        for b in &self.blocks {
            for (i, &gi) in b.dofs.iter().enumerate() {
                for (j, &gj) in b.dofs.iter().enumerate() {
                    t.push((gi, gj, b.matrix[(i, j)]));
                }
            }
        }
        SparseMatrix::from_triplets(self.n_dofs, self.n_dofs, &t)
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.matrix.trace()).sum()
    }

    /// Replaces rows and columns of flagged dofs by identity rows.
    pub fn constrain(&self, flags: &[bool]) -> VertexBlockMatrix {
        let mut out = self.clone();
        for b in &mut out.blocks {
            for (i, &gi) in b.dofs.iter().enumerate() {
                if flags[gi] {
                    for j in 0..b.dofs.len() {
                        b.matrix[(i, j)] = 0.0;
                        b.matrix[(j, i)] = 0.0;
                    }
                    b.matrix[(i, i)] = 1.0;
                }
            }
        }
        out
    }
}

/// Load vectors of the three-field system; the pressure load is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsVectors {
    pub f_r: Vec<f64>,
    pub f_q: Vec<f64>,
    pub f_p: Vec<f64>,
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        Err(FemError::NonPositiveViscosity(mu))
    }
}

fn check_vorticity(space: &FeSpace) -> Result<()> {
    match space.kind() {
        SpaceKind::Lagrange1 | SpaceKind::Nedelec2 => Ok(()),
        kind => Err(FemError::UnsupportedSpace {
            kind,
            dim: space.dim(),
        }),
    }
}

fn check_kind(space: &FeSpace, kind: SpaceKind) -> Result<()> {
    if space.kind() == kind {
        Ok(())
    } else {
        Err(FemError::UnsupportedSpace {
            kind: space.kind(),
            dim: space.dim(),
        })
    }
}

/// Exact vorticity mass matrix `<mu^-1 r, r~>`.
///
/// Uses the closed-form barycentric moments
/// `int lambda_i lambda_j = |w| (1 + delta_ij) / ((d + 1)(d + 2))`.
pub fn assemble_exact_vorticity_mass(space: &FeSpace, mu: f64) -> Result<SparseMatrix> {
    check_mu(mu)?;
    check_vorticity(space)?;
    let mesh = space.mesh();
    let d = mesh.dim();
    let denom = ((d + 1) * (d + 2)) as f64;
    let mut t = Vec::new();
    for c in 0..mesh.n_cells() {
        let geo = mesh.cell_geometry(c);
        let dofs = space.cell_dofs(c);
        let moment = |i: usize, j: usize| geo.volume * if i == j { 2.0 } else { 1.0 } / denom;
        let n = dofs.ids.len();
        for k in 0..n {
            for l in 0..n {
                let v = match space.kind() {
                    SpaceKind::Lagrange1 => moment(k, l),
                    _ => {
                        let (a, b) = FeSpace::nedelec_pair(k);
                        let (a2, b2) = FeSpace::nedelec_pair(l);
                        moment(a, a2) * dot(&geo.grads[b], &geo.grads[b2])
                    }
                };
                t.push((dofs.ids[k], dofs.ids[l], v / mu));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(
        space.n_dofs(),
        space.n_dofs(),
        &t,
    ))
}

/// Vorticity mass matrix under the vertex quadrature rule
/// `<r, r~>_h = sum_w |w| / (d + 1) sum_{x in V(w)} (r . r~)(x)`.
///
/// Each vorticity basis function is nonzero at exactly one vertex, so the
/// result is block diagonal with one block per vertex.
pub fn assemble_quadrature_vorticity_mass(space: &FeSpace, mu: f64) -> Result<VertexBlockMatrix> {
    check_mu(mu)?;
    check_vorticity(space)?;
    let mesh = space.mesh();
    let d = mesh.dim();

    let mut vertex_dofs: Vec<Vec<usize>> = vec![Vec::new(); mesh.n_vertices()];
    for dof in 0..space.n_dofs() {
        let v = space.dof_vertex(dof).expect("vorticity dof has a vertex");
        vertex_dofs[v].push(dof);
    }
    let mut local_index = vec![usize::MAX; space.n_dofs()];
    for dofs in &vertex_dofs {
        for (i, &g) in dofs.iter().enumerate() {
            local_index[g] = i;
        }
    }
    let mut blocks: Vec<VertexBlock> = vertex_dofs
        .into_iter()
        .enumerate()
        .map(|(v, dofs)| {
            let n = dofs.len();
            VertexBlock {
                vertex: v,
                dofs,
                matrix: DMatrix::zeros(n, n),
            }
        })
        .collect();

    for c in 0..mesh.n_cells() {
        let geo = mesh.cell_geometry(c);
        let dofs = space.cell_dofs(c);
        let w = geo.volume / (d + 1) as f64 / mu;
        for a in 0..=d {
            let mut bary = [0.0; 4];
            bary[a] = 1.0;
            let basis = space.eval_local(&geo, &dofs.signs, &bary);
            let v = mesh.cell(c)[a];
            let active: Vec<usize> = (0..dofs.ids.len())
                .filter(|&k| space.dof_vertex(dofs.ids[k]) == Some(v))
                .collect();
            let block = &mut blocks[v];
            for &k in &active {
                for &l in &active {
                    let (i, j) = (local_index[dofs.ids[k]], local_index[dofs.ids[l]]);
                    debug_assert!(block.dofs[i] == dofs.ids[k]);
                    block.matrix[(i, j)] += w * dot(&basis.values[k], &basis.values[l]);
                }
            }
        }
    }
    Ok(VertexBlockMatrix {
        n_dofs: space.n_dofs(),
        blocks,
    })
}

/// `<curl r, q~>`: rows indexed by velocity dofs, columns by vorticity dofs.
pub fn assemble_curl(space_r: &FeSpace, space_q: &FeSpace) -> Result<SparseMatrix> {
    check_vorticity(space_r)?;
    check_kind(space_q, SpaceKind::RT0)?;
    if !space_r.same_mesh(space_q) {
        return Err(FemError::MeshMismatch);
    }
    let mesh = space_r.mesh();
    let d = mesh.dim();
    let centroid = {
        let w = 1.0 / (d + 1) as f64;
        [w, w, w, if d == 3 { w } else { 0.0 }]
    };
    let mut t = Vec::new();
    for c in 0..mesh.n_cells() {
        let geo = mesh.cell_geometry(c);
        let rd = space_r.cell_dofs(c);
        let qd = space_q.cell_dofs(c);
        // curl of r is constant and q is affine, so the centroid rule is exact
        let rb = space_r.eval_local(&geo, &rd.signs, &centroid);
        let qb = space_q.eval_local(&geo, &qd.signs, &centroid);
        for (k, &qi) in qd.ids.iter().enumerate() {
            for (j, &rj) in rd.ids.iter().enumerate() {
                let v = geo.volume * dot(&rb.diffs[j], &qb.values[k]);
                t.push((qi, rj, v));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(
        space_q.n_dofs(),
        space_r.n_dofs(),
        &t,
    ))
}

/// `<div q, p~>`: entry `(cell, facet)` is the orientation sign.
pub fn assemble_div(space_q: &FeSpace, space_p: &FeSpace) -> Result<SparseMatrix> {
    check_kind(space_q, SpaceKind::RT0)?;
    check_kind(space_p, SpaceKind::P0)?;
    if !space_q.same_mesh(space_p) {
        return Err(FemError::MeshMismatch);
    }
    let mesh = space_q.mesh();
    let mut t = Vec::new();
    for c in 0..mesh.n_cells() {
        let qd = space_q.cell_dofs(c);
        for (&f, &s) in qd.ids.iter().zip(&qd.signs) {
            t.push((c, f, s));
        }
    }
    Ok(SparseMatrix::from_triplets(
        space_p.n_dofs(),
        space_q.n_dofs(),
        &t,
    ))
}

/// Boundary data entering the load functionals.
pub struct LoadData<'a> {
    pub g: &'a dyn AnalyticField,
    /// Pressure on the pressure boundary; `None` means zero.
    pub p0: Option<&'a dyn AnalyticField>,
    /// Velocity on the pressure boundary; `None` means zero.
    pub q0: Option<&'a dyn AnalyticField>,
    pub degree: usize,
}

/// Load vectors
/// `f_q = <g, q~> - <p0, nu . q~>_{dP}` and `f_r = -<q0, nu x r~>_{dP}`.
///
/// In 2D, `nu x r~ = [nu_2, -nu_1] r~` for scalar `r~`.
pub fn assemble_rhs(
    data: &LoadData<'_>,
    space_r: &FeSpace,
    space_q: &FeSpace,
) -> Result<RhsVectors> {
    check_vorticity(space_r)?;
    check_kind(space_q, SpaceKind::RT0)?;
    if !space_r.same_mesh(space_q) {
        return Err(FemError::MeshMismatch);
    }
    let mesh = space_q.mesh();
    let d = mesh.dim();
    let mut f_q = vec![0.0; space_q.n_dofs()];
    let mut f_r = vec![0.0; space_r.n_dofs()];

    let rule = SimplexRule::new(d, data.degree);
    for c in 0..mesh.n_cells() {
        let geo = mesh.cell_geometry(c);
        let qd = space_q.cell_dofs(c);
        for (b, w) in rule.bary.iter().zip(&rule.weights) {
            let x = point_from_bary(&geo, b);
            let g = data.g.eval(&x);
            let basis = space_q.eval_local(&geo, &qd.signs, b);
            for (k, &qi) in qd.ids.iter().enumerate() {
                f_q[qi] += w * geo.volume * dot(&g, &basis.values[k]);
            }
        }
    }

    if data.p0.is_none() && data.q0.is_none() {
        return Ok(RhsVectors {
            f_r,
            f_q,
            f_p: vec![0.0; mesh.n_cells()],
        });
    }
    let frule = SimplexRule::new(d - 1, data.degree);
    for f in 0..mesh.n_facets() {
        if mesh.facet_tag(f) != Some(BoundaryTag::P) {
            continue;
        }
        let c = mesh.facet_cells(f)[0];
        let geo = mesh.cell_geometry(c);
        let local = mesh.cell_facets(c).iter().position(|&g| g == f).unwrap();
        let (n_global, measure) = mesh.facet_normal(f);
        let s = mesh.cell_facet_signs(c)[local] as f64;
        let nu = [s * n_global[0], s * n_global[1], s * n_global[2]];
        let qd = space_q.cell_dofs(c);
        let rd = space_r.cell_dofs(c);
        let pts = mesh.facet_points(f);
        for (x, w) in frule.map(&pts[..d], measure) {
            let bary = geo.barycentric(&x);
            if let Some(p0) = data.p0 {
                let p = p0.eval(&x)[0];
                let basis = space_q.eval_local(&geo, &qd.signs, &bary);
                for (k, &qi) in qd.ids.iter().enumerate() {
                    f_q[qi] -= w * p * dot(&nu, &basis.values[k]);
                }
            }
            if let Some(q0) = data.q0 {
                let q = q0.eval(&x);
                let basis = space_r.eval_local(&geo, &rd.signs, &bary);
                for (j, &rj) in rd.ids.iter().enumerate() {
                    let nxr = if d == 2 {
                        let r = basis.values[j][0];
                        [nu[1] * r, -nu[0] * r, 0.0]
                    } else {
                        cross(&nu, &basis.values[j])
                    };
                    f_r[rj] -= w * dot(&q, &nxr);
                }
            }
        }
    }
    Ok(RhsVectors {
        f_r,
        f_q,
        f_p: vec![0.0; mesh.n_cells()],
    })
}

/// Symmetric elimination of essential dofs: flagged rows and columns become
/// identity rows and the matching load entries are zeroed.
pub fn apply_essential_bc(
    matrix: &SparseMatrix,
    rhs: &[f64],
    flags: &[bool],
) -> Result<(SparseMatrix, Vec<f64>)> {
    if flags.len() != matrix.n_rows() || rhs.len() != matrix.n_rows() {
        return Err(FemError::DimensionMismatch {
            what: "essential flags",
            expected: matrix.n_rows(),
            got: flags.len(),
        });
    }
    if !flags.iter().any(|&f| f) {
        return Ok((matrix.clone(), rhs.to_vec()));
    }
    let mut t: Vec<_> = matrix
        .triplets()
        .filter(|&(i, j, _)| !flags[i] && !flags[j])
        .collect();
    t.extend(
        flags
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(|(i, _)| (i, i, 1.0)),
    );
    let m = SparseMatrix::from_triplets(matrix.n_rows(), matrix.n_cols(), &t);
    let b = rhs
        .iter()
        .zip(flags)
        .map(|(&v, &f)| if f { 0.0 } else { v })
        .collect();
    Ok((m, b))
}
