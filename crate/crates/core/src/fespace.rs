//! Lowest-order finite element spaces of the vorticity–velocity–pressure
//! complex.
//!
//! * `Lagrange1`: 2D vorticity, one dof per vertex, curl `[d_y, -d_x] r`.
//! * `Nedelec2`: 3D vorticity, second-kind linear Nédélec elements with the
//!   vertex-associated basis `psi_{e,a} = lambda_a grad(lambda_b)` on edge
//!   `e = (a, b)`. The dof of `psi_{e,a}` is `r(x_a) . (x_b - x_a)`, so each
//!   dof belongs to exactly one vertex. Global dof `2e` sits at the lower
//!   vertex id of `e`, `2e + 1` at the higher.
//! * `RT0`: velocity, one flux dof per facet against the global facet normal.
//! * `P0`: pressure, one dof per cell.
//! * `P0Vec`: elementwise constant vorticity-shaped fields (`k_n` per cell).

use std::sync::Arc;

use crate::error::{FemError, Result};
use crate::mesh::{cross, dot, BoundaryTag, CellGeometry, SimplicialMesh, TET_EDGES};
use crate::mms::AnalyticField;
use crate::quadrature::SimplexRule;

/// Quadrature degree used for interpolation and error integrals.
pub const DATA_QUAD_DEGREE: usize = 6;

/// Barycentric tolerance for point-in-cell checks.
const BARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    Lagrange1,
    Nedelec2,
    RT0,
    P0,
    P0Vec,
}

/// Number of vorticity components: 1 in 2D, 3 in 3D.
pub fn vorticity_components(dim: usize) -> usize {
    if dim == 2 {
        1
    } else {
        3
    }
}

/// Global dof ids and orientation signs of one cell.
#[derive(Debug, Clone)]
pub struct LocalDofs {
    pub ids: Vec<usize>,
    pub signs: Vec<f64>,
}

/// Basis values and differentials (curl or div) at one point.
///
/// Scalar quantities occupy component 0.
#[derive(Debug, Clone)]
pub struct BasisEval {
    pub values: Vec<[f64; 3]>,
    pub diffs: Vec<[f64; 3]>,
}

#[derive(Debug, Clone)]
pub struct FeSpace {
    kind: SpaceKind,
    mesh: Arc<SimplicialMesh>,
    n_dofs: usize,
    essential: Vec<bool>,
}

/// Coefficients of a discrete field.
#[derive(Debug, Clone, PartialEq)]
pub struct DofVector {
    pub kind: SpaceKind,
    pub coeffs: Vec<f64>,
}

impl DofVector {
    pub fn zeros(space: &FeSpace) -> Self {
        DofVector {
            kind: space.kind,
            coeffs: vec![0.0; space.n_dofs()],
        }
    }

    pub fn new(space: &FeSpace, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.n_dofs() {
            return Err(FemError::DimensionMismatch {
                what: "dof vector length",
                expected: space.n_dofs(),
                got: coeffs.len(),
            });
        }
        Ok(DofVector {
            kind: space.kind,
            coeffs,
        })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl FeSpace {
    pub fn new(mesh: Arc<SimplicialMesh>, kind: SpaceKind) -> Result<Self> {
        let dim = mesh.dim();
        let n_dofs = match (kind, dim) {
            (SpaceKind::Lagrange1, 2) => mesh.n_vertices(),
            (SpaceKind::Nedelec2, 3) => 2 * mesh.n_edges(),
            (SpaceKind::RT0, _) => mesh.n_facets(),
            (SpaceKind::P0, _) => mesh.n_cells(),
            (SpaceKind::P0Vec, _) => vorticity_components(dim) * mesh.n_cells(),
            _ => return Err(FemError::UnsupportedSpace { kind, dim }),
        };
        let mut essential = vec![false; n_dofs];
        for f in 0..mesh.n_facets() {
            if mesh.facet_tag(f) != Some(BoundaryTag::Q) {
                continue;
            }
            let fv = mesh.facet_vertices(f);
            match kind {
                SpaceKind::Lagrange1 => {
                    for &v in fv {
                        essential[v] = true;
                    }
                }
                SpaceKind::Nedelec2 => {
                    for i in 0..3 {
                        for j in i + 1..3 {
                            let key = [fv[i], fv[j]];
                            let e = mesh.edges().binary_search(&key).expect("face edge");
                            essential[2 * e] = true;
                            essential[2 * e + 1] = true;
                        }
                    }
                }
                SpaceKind::RT0 => essential[f] = true,
                SpaceKind::P0 | SpaceKind::P0Vec => {}
            }
        }
        Ok(FeSpace {
            kind,
            mesh,
            n_dofs,
            essential,
        })
    }

    /// Vorticity space for the mesh dimension: `Lagrange1` in 2D, `Nedelec2` in 3D.
    pub fn vorticity(mesh: Arc<SimplicialMesh>) -> Result<Self> {
        let kind = if mesh.dim() == 2 {
            SpaceKind::Lagrange1
        } else {
            SpaceKind::Nedelec2
        };
        Self::new(mesh, kind)
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn mesh(&self) -> &Arc<SimplicialMesh> {
        &self.mesh
    }

    pub fn dim(&self) -> usize {
        self.mesh.dim()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    pub fn essential(&self) -> &[bool] {
        &self.essential
    }

    pub fn same_mesh(&self, other: &FeSpace) -> bool {
        Arc::ptr_eq(&self.mesh, &other.mesh)
    }

    /// Number of value components of a basis function.
    pub fn value_components(&self) -> usize {
        match self.kind {
            SpaceKind::Lagrange1 | SpaceKind::P0 => 1,
            SpaceKind::Nedelec2 | SpaceKind::RT0 => self.dim(),
            SpaceKind::P0Vec => vorticity_components(self.dim()),
        }
    }

    /// Number of components of the differential (curl for vorticity spaces,
    /// div for RT0, none for piecewise constants).
    pub fn diff_components(&self) -> usize {
        match self.kind {
            SpaceKind::Lagrange1 => 2,
            SpaceKind::Nedelec2 => 3,
            SpaceKind::RT0 => 1,
            SpaceKind::P0 | SpaceKind::P0Vec => 0,
        }
    }

    pub fn n_local_dofs(&self) -> usize {
        let d = self.dim();
        match self.kind {
            SpaceKind::Lagrange1 | SpaceKind::RT0 => d + 1,
            SpaceKind::Nedelec2 => 12,
            SpaceKind::P0 => 1,
            SpaceKind::P0Vec => vorticity_components(d),
        }
    }

    /// Local vertex pair `(a, b)` of the Nédélec basis `lambda_a grad(lambda_b)`.
    pub fn nedelec_pair(local_dof: usize) -> (usize, usize) {
        let le = TET_EDGES[local_dof / 2];
        if local_dof.is_multiple_of(2) {
            (le[0], le[1])
        } else {
            (le[1], le[0])
        }
    }

    pub fn cell_dofs(&self, c: usize) -> LocalDofs {
        let mesh = &self.mesh;
        match self.kind {
            SpaceKind::Lagrange1 => LocalDofs {
                ids: mesh.cell(c).to_vec(),
                signs: vec![1.0; mesh.dim() + 1],
            },
            SpaceKind::Nedelec2 => {
                let cell = mesh.cell(c);
                let edges = mesh.cell_edges(c);
                let mut ids = Vec::with_capacity(12);
                for k in 0..12 {
                    let (a, _) = Self::nedelec_pair(k);
                    let e = edges[k / 2];
                    let lo = mesh.edges()[e][0];
                    ids.push(2 * e + usize::from(cell[a] != lo));
                }
                LocalDofs {
                    ids,
                    signs: vec![1.0; 12],
                }
            }
            SpaceKind::RT0 => LocalDofs {
                ids: mesh.cell_facets(c).to_vec(),
                signs: mesh.cell_facet_signs(c).iter().map(|&s| s as f64).collect(),
            },
            SpaceKind::P0 => LocalDofs {
                ids: vec![c],
                signs: vec![1.0],
            },
            SpaceKind::P0Vec => {
                let k = vorticity_components(mesh.dim());
                LocalDofs {
                    ids: (0..k).map(|i| k * c + i).collect(),
                    signs: vec![1.0; k],
                }
            }
        }
    }

    /// Vertex owning vorticity dof `dof`.
    pub fn dof_vertex(&self, dof: usize) -> Option<usize> {
        match self.kind {
            SpaceKind::Lagrange1 => Some(dof),
            SpaceKind::Nedelec2 => Some(self.mesh.edges()[dof / 2][dof % 2]),
            _ => None,
        }
    }

    /// Evaluates all local basis functions (with global orientation signs)
    /// of cell `c` at physical point `x`.
    pub fn eval_basis(&self, c: usize, x: &[f64; 3]) -> Result<BasisEval> {
        let geo = self.mesh.cell_geometry(c);
        let bary = geo.barycentric(x);
        let min_bary = bary[..geo.n_vertices()]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min_bary < -BARY_TOL {
            return Err(FemError::PointOutsideCell { cell: c, min_bary });
        }
        let signs = self.cell_dofs(c).signs;
        Ok(self.eval_local(&geo, &signs, &bary))
    }

    /// Basis evaluation given precomputed geometry, dof signs and barycentric
    /// coordinates.
    pub fn eval_local(&self, geo: &CellGeometry, signs: &[f64], bary: &[f64; 4]) -> BasisEval {
        let d = geo.dim;
        let mut values = Vec::with_capacity(signs.len());
        let mut diffs = Vec::with_capacity(signs.len());
        match self.kind {
            SpaceKind::Lagrange1 => {
                for i in 0..=d {
                    let g = geo.grads[i];
                    values.push([bary[i], 0.0, 0.0]);
                    diffs.push([g[1], -g[0], 0.0]);
                }
            }
            SpaceKind::Nedelec2 => {
                for k in 0..12 {
                    let (a, b) = Self::nedelec_pair(k);
                    let gb = geo.grads[b];
                    let la = bary[a];
                    values.push([la * gb[0], la * gb[1], la * gb[2]]);
                    diffs.push(cross(&geo.grads[a], &gb));
                }
            }
            SpaceKind::RT0 => {
                let x = point_from_bary(geo, bary);
                let scale = 1.0 / (d as f64 * geo.volume);
                for i in 0..=d {
                    let s = signs[i] * scale;
                    let xi = geo.vertices[i];
                    values.push([s * (x[0] - xi[0]), s * (x[1] - xi[1]), s * (x[2] - xi[2])]);
                    diffs.push([signs[i] / geo.volume, 0.0, 0.0]);
                }
            }
            SpaceKind::P0 => {
                values.push([1.0, 0.0, 0.0]);
                diffs.push([0.0; 3]);
            }
            SpaceKind::P0Vec => {
                for k in 0..vorticity_components(d) {
                    let mut v = [0.0; 3];
                    v[k] = 1.0;
                    values.push(v);
                    diffs.push([0.0; 3]);
                }
            }
        }
        BasisEval { values, diffs }
    }

    /// Value and differential of a discrete field at barycentric point `bary` of cell `c`.
    pub fn evaluate(&self, coeffs: &[f64], c: usize, bary: &[f64; 4]) -> ([f64; 3], [f64; 3]) {
        let geo = self.mesh.cell_geometry(c);
        let dofs = self.cell_dofs(c);
        let basis = self.eval_local(&geo, &dofs.signs, bary);
        combine(&dofs.ids, &basis, coeffs)
    }

    /// Canonical interpolant (vertex values, edge moments, facet fluxes) or
    /// L² projection (piecewise constants) of an analytic field.
    pub fn interpolate(&self, field: &dyn AnalyticField) -> DofVector {
        self.interpolate_with_degree(field, DATA_QUAD_DEGREE)
    }

    pub fn interpolate_with_degree(&self, field: &dyn AnalyticField, degree: usize) -> DofVector {
        let mesh = &self.mesh;
        let d = mesh.dim();
        let mut coeffs = vec![0.0; self.n_dofs];
        match self.kind {
            SpaceKind::Lagrange1 => {
                for (v, x) in mesh.vertices().iter().enumerate() {
                    coeffs[v] = field.eval(x)[0];
                }
            }
            SpaceKind::Nedelec2 => {
                // Moments of the tangential trace against the two endpoint
                // hat functions, mapped to endpoint values of a linear trace.
                let rule = SimplexRule::new(1, degree + 1);
                for (e, ed) in mesh.edges().iter().enumerate() {
                    let xa = mesh.vertex(ed[0]);
                    let xb = mesh.vertex(ed[1]);
                    let t = crate::mesh::sub(xb, xa);
                    let (mut m_lo, mut m_hi) = (0.0, 0.0);
                    for (b, w) in rule.bary.iter().zip(&rule.weights) {
                        let x = [
                            b[0] * xa[0] + b[1] * xb[0],
                            b[0] * xa[1] + b[1] * xb[1],
                            b[0] * xa[2] + b[1] * xb[2],
                        ];
                        let rt = dot(&field.eval(&x), &t);
                        m_lo += w * rt * b[0];
                        m_hi += w * rt * b[1];
                    }
                    coeffs[2 * e] = 4.0 * m_lo - 2.0 * m_hi;
                    coeffs[2 * e + 1] = -(4.0 * m_hi - 2.0 * m_lo);
                }
            }
            SpaceKind::RT0 => {
                let rule = SimplexRule::new(d - 1, degree);
                for (f, coeff) in coeffs.iter_mut().enumerate() {
                    let (n, measure) = mesh.facet_normal(f);
                    let pts = mesh.facet_points(f);
                    *coeff = rule
                        .map(&pts[..d], measure)
                        .map(|(x, w)| w * dot(&field.eval(&x), &n))
                        .sum();
                }
            }
            SpaceKind::P0 | SpaceKind::P0Vec => {
                let rule = SimplexRule::new(d, degree);
                let k = if self.kind == SpaceKind::P0 {
                    1
                } else {
                    vorticity_components(d)
                };
                for c in 0..mesh.n_cells() {
                    let geo = mesh.cell_geometry(c);
                    let mut acc = [0.0; 3];
                    for (x, w) in rule.map(geo.verts(), geo.volume) {
                        let v = field.eval(&x);
                        for i in 0..k {
                            acc[i] += w * v[i];
                        }
                    }
                    for i in 0..k {
                        coeffs[k * c + i] = acc[i] / geo.volume;
                    }
                }
            }
        }
        DofVector {
            kind: self.kind,
            coeffs,
        }
    }

    /// Cellwise constant curl (vorticity spaces) or divergence (RT0) of a
    /// discrete field, `diff_components()` entries per cell.
    pub fn cell_differentials(&self, coeffs: &[f64]) -> Vec<[f64; 3]> {
        let centroid = {
            let w = 1.0 / (self.dim() + 1) as f64;
            [w, w, w, if self.dim() == 3 { w } else { 0.0 }]
        };
        (0..self.mesh.n_cells())
            .map(|c| self.evaluate(coeffs, c, &centroid).1)
            .collect()
    }
}

pub(crate) fn point_from_bary(geo: &CellGeometry, bary: &[f64; 4]) -> [f64; 3] {
    let mut x = [0.0; 3];
    for (i, v) in geo.verts().iter().enumerate() {
        for k in 0..3 {
            x[k] += bary[i] * v[k];
        }
    }
    x
}

pub(crate) fn combine(ids: &[usize], basis: &BasisEval, coeffs: &[f64]) -> ([f64; 3], [f64; 3]) {
    let mut val = [0.0; 3];
    let mut diff = [0.0; 3];
    for (j, &g) in ids.iter().enumerate() {
        let a = coeffs[g];
        for k in 0..3 {
            val[k] += a * basis.values[j][k];
            diff[k] += a * basis.diffs[j][k];
        }
    }
    (val, diff)
}
