//! Simplicial meshes of the unit square and unit cube.
//!
//! Entities (edges, faces) are stored as sorted vertex tuples in
//! lexicographic order. Every facet carries a global normal fixed by its
//! sorted tuple: in 2D the edge `(a, b)` has tangent `x_b - x_a` and normal
//! `(t_y, -t_x)`; in 3D the face `(a, b, c)` has normal
//! `(x_b - x_a) x (x_c - x_a)`. A cell's orientation sign on a facet is `+1`
//! when its outward normal agrees with the global one.

use std::fmt::Write as _;

use crate::error::{FemError, Result};

/// Local edges of a triangle, as pairs of local vertex indices.
pub const TRI_EDGES: [[usize; 2]; 3] = [[0, 1], [0, 2], [1, 2]];
/// Local edges of a tetrahedron, as pairs of local vertex indices.
pub const TET_EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

pub(crate) fn local_edges(dim: usize) -> &'static [[usize; 2]] {
    if dim == 2 {
        &TRI_EDGES
    } else {
        &TET_EDGES
    }
}

#[inline]
pub(crate) fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Boundary condition class of a boundary facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    /// Pressure and tangential velocity prescribed.
    P,
    /// Normal velocity and tangential vorticity vanish.
    Q,
}

/// Affine geometry of one simplex.
#[derive(Debug, Clone, Copy)]
pub struct CellGeometry {
    pub dim: usize,
    pub vertices: [[f64; 3]; 4],
    pub volume: f64,
    /// Gradients of the barycentric coordinates.
    pub grads: [[f64; 3]; 4],
}

impl CellGeometry {
    pub fn new(dim: usize, vertices: [[f64; 3]; 4]) -> Self {
        let x0 = vertices[0];
        let e1 = sub(&vertices[1], &x0);
        let e2 = sub(&vertices[2], &x0);
        let mut grads = [[0.0; 3]; 4];
        let volume;
        if dim == 2 {
            let det = e1[0] * e2[1] - e2[0] * e1[1];
            volume = det / 2.0;
            grads[1] = [e2[1] / det, -e2[0] / det, 0.0];
            grads[2] = [-e1[1] / det, e1[0] / det, 0.0];
        } else {
            let e3 = sub(&vertices[3], &x0);
            let c23 = cross(&e2, &e3);
            let det = dot(&e1, &c23);
            volume = det / 6.0;
            let c31 = cross(&e3, &e1);
            let c12 = cross(&e1, &e2);
            for k in 0..3 {
                grads[1][k] = c23[k] / det;
                grads[2][k] = c31[k] / det;
                grads[3][k] = c12[k] / det;
            }
        }
        for k in 0..3 {
            grads[0][k] = -(grads[1][k] + grads[2][k] + grads[3][k]);
        }
        CellGeometry {
            dim,
            vertices,
            volume,
            grads,
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.dim + 1
    }

    pub fn verts(&self) -> &[[f64; 3]] {
        &self.vertices[..self.dim + 1]
    }

    /// Barycentric coordinates of `x`.
    pub fn barycentric(&self, x: &[f64; 3]) -> [f64; 4] {
        let d = sub(x, &self.vertices[0]);
        let mut l = [0.0; 4];
        let mut rest = 0.0;
        for i in 1..=self.dim {
            l[i] = dot(&self.grads[i], &d);
            rest += l[i];
        }
        l[0] = 1.0 - rest;
        l
    }

    pub fn centroid(&self) -> [f64; 3] {
        let mut c = [0.0; 3];
        let w = 1.0 / (self.dim + 1) as f64;
        for v in self.verts() {
            for k in 0..3 {
                c[k] += w * v[k];
            }
        }
        c
    }

    pub fn diameter(&self) -> f64 {
        let v = self.verts();
        let mut h: f64 = 0.0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                h = h.max(norm(&sub(&v[i], &v[j])));
            }
        }
        h
    }
}

/// A conforming simplicial mesh with derived connectivity.
#[derive(Debug, Clone)]
pub struct SimplicialMesh {
    dim: usize,
    vertices: Vec<[f64; 3]>,
    cells: Vec<[usize; 4]>,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    cell_edges: Vec<[usize; 6]>,
    cell_edge_signs: Vec<[i8; 6]>,
    cell_facets: Vec<[usize; 4]>,
    cell_facet_signs: Vec<[i8; 4]>,
    facet_cells: Vec<Vec<usize>>,
    facet_tags: Vec<Option<BoundaryTag>>,
    vertex_edges: Vec<Vec<usize>>,
}

impl SimplicialMesh {
    /// Builds a mesh from raw vertices and cells and derives all entities.
    ///
    /// 2D coordinates are given with a zero third component. Cells with
    /// negative orientation are reordered.
    pub fn from_cells(dim: usize, vertices: Vec<[f64; 3]>, cells: Vec<Vec<usize>>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(FemError::UnsupportedDimension(dim));
        }
        let mut packed = Vec::with_capacity(cells.len());
        for (c, cell) in cells.iter().enumerate() {
            if cell.len() != dim + 1 {
                return Err(FemError::DimensionMismatch {
                    what: "vertices per cell",
                    expected: dim + 1,
                    got: cell.len(),
                });
            }
            let mut arr = [usize::MAX; 4];
            for (i, &v) in cell.iter().enumerate() {
                if v >= vertices.len() {
                    return Err(FemError::VertexOutOfRange {
                        cell: c,
                        vertex: v,
                        n_vertices: vertices.len(),
                    });
                }
                arr[i] = v;
            }
            packed.push(arr);
        }
        let mut mesh = SimplicialMesh {
            dim,
            vertices,
            cells: packed,
            edges: Vec::new(),
            faces: Vec::new(),
            cell_edges: Vec::new(),
            cell_edge_signs: Vec::new(),
            cell_facets: Vec::new(),
            cell_facet_signs: Vec::new(),
            facet_cells: Vec::new(),
            facet_tags: Vec::new(),
            vertex_edges: Vec::new(),
        };
        mesh.derive_entities()?;
        Ok(mesh)
    }

    /// Unit square split into `n x n` squares, each cut along the
    /// `(0,0)-(1,1)` diagonal (2D), or unit cube split into `n^3` cubes with
    /// the six-tetrahedron Kuhn subdivision (3D).
    pub fn structured(dim: usize, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(FemError::InvalidResolution(n));
        }
        let h = 1.0 / n as f64;
        let np = n + 1;
        match dim {
            2 => {
                let id = |i: usize, j: usize| j * np + i;
                let mut vertices = Vec::with_capacity(np * np);
                for j in 0..np {
                    for i in 0..np {
                        vertices.push([i as f64 * h, j as f64 * h, 0.0]);
                    }
                }
                let mut cells = Vec::with_capacity(2 * n * n);
                for j in 0..n {
                    for i in 0..n {
                        let v00 = id(i, j);
                        let v10 = id(i + 1, j);
                        let v01 = id(i, j + 1);
                        let v11 = id(i + 1, j + 1);
                        cells.push(vec![v00, v10, v11]);
                        cells.push(vec![v00, v11, v01]);
                    }
                }
                Self::from_cells(2, vertices, cells)
            }
            3 => {
                let id = |i: usize, j: usize, k: usize| (k * np + j) * np + i;
                let mut vertices = Vec::with_capacity(np * np * np);
                for k in 0..np {
                    for j in 0..np {
                        for i in 0..np {
                            vertices.push([i as f64 * h, j as f64 * h, k as f64 * h]);
                        }
                    }
                }
                const PERMS: [[usize; 3]; 6] = [
                    [0, 1, 2],
                    [0, 2, 1],
                    [1, 0, 2],
                    [1, 2, 0],
                    [2, 0, 1],
                    [2, 1, 0],
                ];
                let mut cells = Vec::with_capacity(6 * n * n * n);
                for k in 0..n {
                    for j in 0..n {
                        for i in 0..n {
                            for perm in PERMS {
                                let mut p = [i, j, k];
                                let mut tet = vec![id(p[0], p[1], p[2])];
                                for axis in perm {
                                    p[axis] += 1;
                                    tet.push(id(p[0], p[1], p[2]));
                                }
                                cells.push(tet);
                            }
                        }
                    }
                }
                Self::from_cells(3, vertices, cells)
            }
            d => Err(FemError::UnsupportedDimension(d)),
        }
    }

    /// Populates edges, faces, incidences and orientation signs.
    ///
    /// Idempotent: re-running on a derived mesh reproduces the same entities.
    pub fn derive_entities(&mut self) -> Result<()> {
        let dim = self.dim;
        let nv = dim + 1;

        for (c, cell) in self.cells.iter_mut().enumerate() {
            let mut verts = [[0.0; 3]; 4];
            for i in 0..nv {
                verts[i] = self.vertices[cell[i]];
            }
            let vol = CellGeometry::new(dim, verts).volume;
            let scale = CellGeometry::new(dim, verts).diameter().powi(dim as i32);
            if vol.abs() <= 1e-14 * scale {
                return Err(FemError::DegenerateCell {
                    cell: c,
                    volume: vol,
                });
            }
            if vol < 0.0 {
                cell.swap(dim - 1, dim);
            }
        }

        let mut edges: Vec<[usize; 2]> = Vec::new();
        for cell in &self.cells {
            for le in local_edges(dim) {
                let (a, b) = (cell[le[0]], cell[le[1]]);
                edges.push([a.min(b), a.max(b)]);
            }
        }
        edges.sort_unstable();
        edges.dedup();

        let mut faces: Vec<[usize; 3]> = Vec::new();
        if dim == 3 {
            for cell in &self.cells {
                for i in 0..4 {
                    faces.push(sorted_facet3(cell, i));
                }
            }
            faces.sort_unstable();
            faces.dedup();
        }

        let mut cell_edges = Vec::with_capacity(self.cells.len());
        let mut cell_edge_signs = Vec::with_capacity(self.cells.len());
        for cell in &self.cells {
            let mut ids = [usize::MAX; 6];
            let mut signs = [0i8; 6];
            for (k, le) in local_edges(dim).iter().enumerate() {
                let (a, b) = (cell[le[0]], cell[le[1]]);
                let key = [a.min(b), a.max(b)];
                ids[k] = edges.binary_search(&key).expect("edge collected above");
                signs[k] = if a < b { 1 } else { -1 };
            }
            cell_edges.push(ids);
            cell_edge_signs.push(signs);
        }

        let n_facets = if dim == 2 { edges.len() } else { faces.len() };
        let mut facet_cells: Vec<Vec<usize>> = vec![Vec::new(); n_facets];
        let mut cell_facets = Vec::with_capacity(self.cells.len());
        for (c, cell) in self.cells.iter().enumerate() {
            let mut ids = [usize::MAX; 4];
            for i in 0..nv {
                let f = if dim == 2 {
                    let mut e = [0; 2];
                    let mut m = 0;
                    for (j, &v) in cell[..3].iter().enumerate() {
                        if j != i {
                            e[m] = v;
                            m += 1;
                        }
                    }
                    e.sort_unstable();
                    edges.binary_search(&e).expect("edge collected above")
                } else {
                    faces
                        .binary_search(&sorted_facet3(cell, i))
                        .expect("face collected above")
                };
                ids[i] = f;
                facet_cells[f].push(c);
            }
            cell_facets.push(ids);
        }
        for (f, cs) in facet_cells.iter().enumerate() {
            if cs.len() > 2 {
                let facet = if dim == 2 {
                    edges[f].to_vec()
                } else {
                    faces[f].to_vec()
                };
                return Err(FemError::NonManifold {
                    facet,
                    count: cs.len(),
                });
            }
        }

        let mut vertex_edges = vec![Vec::new(); self.vertices.len()];
        for (e, ed) in edges.iter().enumerate() {
            vertex_edges[ed[0]].push(e);
            vertex_edges[ed[1]].push(e);
        }

        let old_tags = std::mem::take(&mut self.facet_tags);
        self.edges = edges;
        self.faces = faces;
        self.cell_edges = cell_edges;
        self.cell_edge_signs = cell_edge_signs;
        self.cell_facets = cell_facets;
        self.facet_cells = facet_cells;
        self.vertex_edges = vertex_edges;

        let mut signs = Vec::with_capacity(self.cells.len());
        for c in 0..self.cells.len() {
            let geo = self.cell_geometry(c);
            let mut s = [0i8; 4];
            for i in 0..nv {
                let f = self.cell_facets[c][i];
                let n = self.facet_global_normal(f);
                let x_on = self.vertices[self.facet_vertices(f)[0]];
                let out = sub(&x_on, &geo.vertices[i]);
                s[i] = if dot(&n, &out) > 0.0 { 1 } else { -1 };
            }
            signs.push(s);
        }
        self.cell_facet_signs = signs;

        self.facet_tags = (0..n_facets)
            .map(|f| {
                if self.facet_cells[f].len() == 1 {
                    Some(old_tags.get(f).copied().flatten().unwrap_or(BoundaryTag::P))
                } else {
                    None
                }
            })
            .collect();
        Ok(())
    }

    /// Marks every boundary facet whose centroid satisfies `pred` with `tag`.
    pub fn tag_boundary(&mut self, tag: BoundaryTag, pred: impl Fn(&[f64; 3]) -> bool) {
        for f in 0..self.n_facets() {
            if self.facet_tags[f].is_some() && pred(&self.facet_centroid(f)) {
                self.facet_tags[f] = Some(tag);
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn n_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn n_facets(&self) -> usize {
        if self.dim == 2 {
            self.edges.len()
        } else {
            self.faces.len()
        }
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &[f64; 3] {
        &self.vertices[v]
    }

    /// Vertex ids of cell `c`, positively oriented.
    pub fn cell(&self, c: usize) -> &[usize] {
        &self.cells[c][..self.dim + 1]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    /// Global edge ids of cell `c`, in the order of [`TRI_EDGES`] / [`TET_EDGES`].
    pub fn cell_edges(&self, c: usize) -> &[usize] {
        &self.cell_edges[c][..local_edges(self.dim).len()]
    }

    /// `+1` when local edge direction (low to high local index) matches the
    /// global edge direction (low to high vertex id).
    pub fn cell_edge_signs(&self, c: usize) -> &[i8] {
        &self.cell_edge_signs[c][..local_edges(self.dim).len()]
    }

    /// Global facet ids of cell `c`; entry `i` is the facet opposite local vertex `i`.
    pub fn cell_facets(&self, c: usize) -> &[usize] {
        &self.cell_facets[c][..self.dim + 1]
    }

    pub fn cell_facet_signs(&self, c: usize) -> &[i8] {
        &self.cell_facet_signs[c][..self.dim + 1]
    }

    pub fn facet_cells(&self, f: usize) -> &[usize] {
        &self.facet_cells[f]
    }

    pub fn facet_tag(&self, f: usize) -> Option<BoundaryTag> {
        self.facet_tags[f]
    }

    pub fn is_boundary_facet(&self, f: usize) -> bool {
        self.facet_tags[f].is_some()
    }

    /// Edges incident to vertex `v`, ascending.
    pub fn vertex_edges(&self, v: usize) -> &[usize] {
        &self.vertex_edges[v]
    }

    /// Sorted vertex ids of facet `f`.
    pub fn facet_vertices(&self, f: usize) -> &[usize] {
        if self.dim == 2 {
            &self.edges[f]
        } else {
            &self.faces[f]
        }
    }

    /// Global (unnormalized) facet normal fixed by the sorted vertex tuple.
    /// Its length equals the facet measure in 2D and twice the area in 3D.
    fn facet_global_normal(&self, f: usize) -> [f64; 3] {
        let fv = self.facet_vertices(f);
        let xa = self.vertices[fv[0]];
        let t1 = sub(&self.vertices[fv[1]], &xa);
        if self.dim == 2 {
            [t1[1], -t1[0], 0.0]
        } else {
            let t2 = sub(&self.vertices[fv[2]], &xa);
            cross(&t1, &t2)
        }
    }

    /// Unit global normal and measure of facet `f`.
    pub fn facet_normal(&self, f: usize) -> ([f64; 3], f64) {
        let n = self.facet_global_normal(f);
        let len = norm(&n);
        let measure = if self.dim == 2 { len } else { 0.5 * len };
        ([n[0] / len, n[1] / len, n[2] / len], measure)
    }

    pub fn facet_centroid(&self, f: usize) -> [f64; 3] {
        let fv = self.facet_vertices(f);
        let mut c = [0.0; 3];
        for &v in fv {
            for k in 0..3 {
                c[k] += self.vertices[v][k] / fv.len() as f64;
            }
        }
        c
    }

    pub fn facet_points(&self, f: usize) -> [[f64; 3]; 3] {
        let mut pts = [[0.0; 3]; 3];
        for (i, &v) in self.facet_vertices(f).iter().enumerate() {
            pts[i] = self.vertices[v];
        }
        pts
    }

    pub fn cell_geometry(&self, c: usize) -> CellGeometry {
        let mut verts = [[0.0; 3]; 4];
        for (i, &v) in self.cell(c).iter().enumerate() {
            verts[i] = self.vertices[v];
        }
        CellGeometry::new(self.dim, verts)
    }

    /// Local index of vertex `v` within cell `c`.
    pub fn local_vertex(&self, c: usize, v: usize) -> Option<usize> {
        self.cell(c).iter().position(|&w| w == v)
    }

    /// Maximum cell diameter.
    pub fn mesh_size(&self) -> f64 {
        (0..self.n_cells())
            .map(|c| self.cell_geometry(c).diameter())
            .fold(0.0, f64::max)
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.n_cells())
            .map(|c| self.cell_geometry(c).volume)
            .sum()
    }

    /// Plain-text dump: `DIM`, `VERTICES k`, coordinates, `CELLS m`, vertex ids.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.dim);
        let _ = writeln!(s, "VERTICES {}", self.n_vertices());
        for v in &self.vertices {
            let coords: Vec<String> = v[..self.dim].iter().map(|x| format!("{x:.17e}")).collect();
            let _ = writeln!(s, "{}", coords.join(" "));
        }
        let _ = writeln!(s, "CELLS {}", self.n_cells());
        for c in 0..self.n_cells() {
            let ids: Vec<String> = self.cell(c).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(s, "{}", ids.join(" "));
        }
        s
    }
}

fn sorted_facet3(cell: &[usize; 4], opposite: usize) -> [usize; 3] {
    let mut f = [0; 3];
    let mut m = 0;
    for (j, &v) in cell.iter().enumerate() {
        if j != opposite {
            f[m] = v;
            m += 1;
        }
    }
    f.sort_unstable();
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structured_counts() {
        let m = SimplicialMesh::structured(2, 1).unwrap();
        assert_eq!((m.n_vertices(), m.n_cells(), m.n_edges()), (4, 2, 5));
        let m = SimplicialMesh::structured(2, 2).unwrap();
        assert_eq!((m.n_vertices(), m.n_cells(), m.n_edges()), (9, 8, 16));
        let m = SimplicialMesh::structured(3, 1).unwrap();
        assert_eq!(
            (m.n_vertices(), m.n_cells(), m.n_edges(), m.n_faces()),
            (8, 6, 19, 18)
        );
    }

    #[test]
    fn closed_form_counts_2d() {
        for n in 1..7 {
            let m = SimplicialMesh::structured(2, n).unwrap();
            assert_eq!(m.n_vertices(), (n + 1) * (n + 1));
            assert_eq!(m.n_cells(), 2 * n * n);
            assert_eq!(m.n_edges(), 3 * n * n + 2 * n);
            // Euler characteristic of a disc
            assert_eq!(
                m.n_vertices() as i64 - m.n_edges() as i64 + m.n_cells() as i64,
                1
            );
        }
    }

    #[test]
    fn zero_resolution_rejected() {
        assert!(matches!(
            SimplicialMesh::structured(2, 0),
            Err(FemError::InvalidResolution(0))
        ));
        assert!(SimplicialMesh::structured(4, 2).is_err());
    }

    #[test]
    fn mesh_sizes() {
        let h = SimplicialMesh::structured(2, 1).unwrap().mesh_size();
        assert!((h - 2f64.sqrt()).abs() < 1e-15);
        let h = SimplicialMesh::structured(2, 5).unwrap().mesh_size();
        assert!((h - 2f64.sqrt() / 5.0).abs() < 1e-15);
        let h = SimplicialMesh::structured(3, 1).unwrap().mesh_size();
        assert!((h - 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_triangle() {
        let m = SimplicialMesh::from_cells(
            2,
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        assert_eq!(m.n_edges(), 3);
        for f in 0..3 {
            assert_eq!(m.facet_cells(f).len(), 1);
            assert_eq!(m.facet_tag(f), Some(BoundaryTag::P));
        }
    }

    #[test]
    fn negatively_oriented_cell_is_flipped() {
        let m = SimplicialMesh::from_cells(
            2,
            vec![[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
            vec![vec![0, 2, 1]],
        )
        .unwrap();
        assert!(m.cell_geometry(0).volume > 0.0);
    }

    #[test]
    fn shared_edge_has_opposite_signs() {
        let m = SimplicialMesh::structured(2, 1).unwrap();
        let diag = m.edges().binary_search(&[0, 3]).unwrap();
        let mut signs = Vec::new();
        for c in 0..2 {
            let i = m.cell_facets(c).iter().position(|&f| f == diag).unwrap();
            signs.push(m.cell_facet_signs(c)[i]);
        }
        signs.sort();
        assert_eq!(signs, vec![-1, 1]);
    }

    #[test]
    fn non_manifold_rejected() {
        let verts = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [-1.0, 0.5, 0.0],
        ];
        let cells = vec![vec![0, 1, 2], vec![0, 3, 1], vec![0, 1, 4]];
        assert!(matches!(
            SimplicialMesh::from_cells(2, verts, cells),
            Err(FemError::NonManifold { .. })
        ));
    }

    #[test]
    fn derive_entities_is_idempotent() {
        let mut m = SimplicialMesh::structured(3, 2).unwrap();
        m.tag_boundary(BoundaryTag::Q, |x| x[2] < 1e-12);
        let before = m.clone();
        m.derive_entities().unwrap();
        assert_eq!(m.edges, before.edges);
        assert_eq!(m.faces, before.faces);
        assert_eq!(m.cell_facet_signs, before.cell_facet_signs);
        assert_eq!(m.facet_tags, before.facet_tags);
    }
}
