//! Brute-force elementwise oracles that share no code with the library:
//! barycentric calculus through nalgebra, basis functions written out from
//! their formulas, and classical degree-2 rules.
#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix3};

use mvmfem::assembly::{
    assemble_curl, assemble_div, assemble_exact_vorticity_mass, assemble_quadrature_vorticity_mass,
    assemble_rhs, LoadData,
};
use mvmfem::mms::FnField;
use mvmfem::sparse::SparseMatrix;
use mvmfem::{FeSpace, SimplicialMesh, SpaceKind};

pub const TOL: f64 = 1e-12;

type V3 = [f64; 3];

fn sub(a: &V3, b: &V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}
fn dot(a: &V3, b: &V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
fn cross(a: &V3, b: &V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
fn scale(s: f64, a: &V3) -> V3 {
    [s * a[0], s * a[1], s * a[2]]
}

/// Affine geometry of one simplex computed independently.
struct Simplex {
    x: Vec<V3>,
    vol: f64,
    grads: Vec<V3>,
}

impl Simplex {
    fn new(x: Vec<V3>) -> Self {
        let d = x.len() - 1;
        let mut grads = vec![[0.0; 3]; d + 1];
        let vol;
        if d == 2 {
            let j = Matrix2::new(
                x[1][0] - x[0][0],
                x[2][0] - x[0][0],
                x[1][1] - x[0][1],
                x[2][1] - x[0][1],
            );
            vol = j.determinant().abs() / 2.0;
            let jinv = j.try_inverse().unwrap();
            for i in 0..2 {
                grads[i + 1] = [jinv[(i, 0)], jinv[(i, 1)], 0.0];
            }
        } else {
            let j = Matrix3::from_fn(|r, c| x[c + 1][r] - x[0][r]);
            vol = j.determinant().abs() / 6.0;
            let jinv = j.try_inverse().unwrap();
            for i in 0..3 {
                grads[i + 1] = [jinv[(i, 0)], jinv[(i, 1)], jinv[(i, 2)]];
            }
        }
        let mut g0 = [0.0; 3];
        for g in &grads[1..] {
            g0 = sub(&g0, g);
        }
        grads[0] = g0;
        Simplex { x, vol, grads }
    }

    fn point(&self, bary: &[f64]) -> V3 {
        let mut p = [0.0; 3];
        for (b, x) in bary.iter().zip(&self.x) {
            for k in 0..3 {
                p[k] += b * x[k];
            }
        }
        p
    }
}

/// Degree-2 rules: edge midpoints (triangle) and the symmetric 4-point rule (tetrahedron).
fn degree2_rule(d: usize) -> Vec<(Vec<f64>, f64)> {
    if d == 2 {
        vec![
            (vec![0.5, 0.5, 0.0], 1.0 / 3.0),
            (vec![0.0, 0.5, 0.5], 1.0 / 3.0),
            (vec![0.5, 0.0, 0.5], 1.0 / 3.0),
        ]
    } else {
        let a = 0.585_410_196_624_968_5;
        let b = 0.138_196_601_125_010_5;
        (0..4)
            .map(|i| {
                let mut v = vec![b; 4];
                v[i] = a;
                (v, 0.25)
            })
            .collect()
    }
}

/// Simpson on segments, edge midpoints on triangles; both exact for degree 2.
fn facet_rule(d: usize) -> Vec<(Vec<f64>, f64)> {
    if d == 2 {
        vec![
            (vec![1.0, 0.0], 1.0 / 6.0),
            (vec![0.5, 0.5], 4.0 / 6.0),
            (vec![0.0, 1.0], 1.0 / 6.0),
        ]
    } else {
        vec![
            (vec![0.5, 0.5, 0.0], 1.0 / 3.0),
            (vec![0.0, 0.5, 0.5], 1.0 / 3.0),
            (vec![0.5, 0.0, 0.5], 1.0 / 3.0),
        ]
    }
}

/// Global basis of the vorticity space on cell `c`: (global dof, value fn, curl).
struct VortBasis {
    dof: usize,
    /// value at barycentric point
    value: Box<dyn Fn(&[f64]) -> V3>,
    curl: V3,
}

fn vorticity_basis(mesh: &SimplicialMesh, c: usize, s: &Simplex) -> Vec<VortBasis> {
    let cell = mesh.cell(c).to_vec();
    if mesh.dim() == 2 {
        (0..3)
            .map(|i| {
                let g = s.grads[i];
                VortBasis {
                    dof: cell[i],
                    value: Box::new(move |b: &[f64]| [b[i], 0.0, 0.0]),
                    curl: [g[1], -g[0], 0.0],
                }
            })
            .collect()
    } else {
        let mut out = Vec::new();
        for (e, ed) in mesh.edges().iter().enumerate() {
            let (Some(ia), Some(ib)) = (
                cell.iter().position(|&v| v == ed[0]),
                cell.iter().position(|&v| v == ed[1]),
            ) else {
                continue;
            };
            // dof 2e at the lower id: lambda_lo grad lambda_hi; 2e + 1 swapped
            for (dof, a, b) in [(2 * e, ia, ib), (2 * e + 1, ib, ia)] {
                let gb = s.grads[b];
                out.push(VortBasis {
                    dof,
                    value: Box::new(move |bary: &[f64]| scale(bary[a], &gb)),
                    curl: cross(&s.grads[a], &gb),
                });
            }
        }
        out
    }
}

/// Global normal of a facet from its sorted vertex tuple.
fn global_normal(mesh: &SimplicialMesh, f: usize) -> V3 {
    let mut fv = mesh.facet_vertices(f).to_vec();
    fv.sort_unstable();
    let x = |i: usize| *mesh.vertex(fv[i]);
    let t1 = sub(&x(1), &x(0));
    if mesh.dim() == 2 {
        [t1[1], -t1[0], 0.0]
    } else {
        cross(&t1, &sub(&x(2), &x(0)))
    }
}

/// RT0 basis on cell `c` with unit flux along the global normal:
/// (facet, sign, value fn, divergence).
fn rt0_basis(
    mesh: &SimplicialMesh,
    c: usize,
    s: &Simplex,
) -> Vec<(usize, f64, Box<dyn Fn(&V3) -> V3>, f64)> {
    let d = mesh.dim();
    let cell = mesh.cell(c).to_vec();
    let mut out = Vec::new();
    for f in 0..mesh.n_facets() {
        let fv = mesh.facet_vertices(f);
        if !fv.iter().all(|v| cell.contains(v)) {
            continue;
        }
        let i = (0..=d).find(|&i| !fv.contains(&cell[i])).unwrap();
        let xi = s.x[i];
        let outward = sub(mesh.vertex(fv[0]), &xi);
        let sign = dot(&outward, &global_normal(mesh, f)).signum();
        let k = sign / (d as f64 * s.vol);
        out.push((
            f,
            sign,
            Box::new(move |x: &V3| scale(k, &sub(x, &xi))) as Box<dyn Fn(&V3) -> V3>,
            sign / s.vol,
        ));
    }
    out
}

fn simplex(mesh: &SimplicialMesh, c: usize) -> Simplex {
    Simplex::new(mesh.cell(c).iter().map(|&v| *mesh.vertex(v)).collect())
}

fn matrix_deviation(assembled: &SparseMatrix, oracle: &DMatrix<f64>) -> f64 {
    if assembled.n_rows() != oracle.nrows() || assembled.n_cols() != oracle.ncols() {
        return f64::INFINITY;
    }
    let dense = assembled.to_dense();
    let mut worst = 0.0f64;
    for i in 0..oracle.nrows() {
        for j in 0..oracle.ncols() {
            worst = worst.max((dense[i][j] - oracle[(i, j)]).abs());
        }
    }
    worst
}

fn vector_deviation(a: &[f64], b: &DVector<f64>) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Two distorted triangles sharing an edge.
pub fn two_triangles() -> SimplicialMesh {
    SimplicialMesh::from_cells(
        2,
        vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.2, 0.0],
            [0.3, 1.1, 0.0],
            [1.2, 1.0, 0.0],
        ],
        vec![vec![0, 1, 2], vec![1, 3, 2]],
    )
    .unwrap()
}

/// Kuhn cube with shifted vertices.
pub fn six_tets() -> SimplicialMesh {
    let base = SimplicialMesh::structured(3, 1).unwrap();
    let verts: Vec<V3> = base
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let t = i as f64;
            [
                x[0] + 0.07 * (t * 1.3).sin(),
                x[1] + 0.05 * (t * 0.7).cos(),
                x[2] + 0.06 * (t * 2.1).sin(),
            ]
        })
        .collect();
    let cells = (0..base.n_cells()).map(|c| base.cell(c).to_vec()).collect();
    SimplicialMesh::from_cells(3, verts, cells).unwrap()
}

struct Oracle {
    a: DMatrix<f64>,
    a_h: DMatrix<f64>,
    b_r: DMatrix<f64>,
    b_q: DMatrix<f64>,
    f_q: DVector<f64>,
    f_r: DVector<f64>,
}

fn oracle(
    mesh: &SimplicialMesh,
    mu: f64,
    g: &dyn Fn(&V3) -> V3,
    p0: &dyn Fn(&V3) -> f64,
    q0: &dyn Fn(&V3) -> V3,
) -> Oracle {
    let d = mesh.dim();
    let nr = if d == 2 {
        mesh.n_vertices()
    } else {
        2 * mesh.n_edges()
    };
    let nq = mesh.n_facets();
    let np = mesh.n_cells();
    let mut o = Oracle {
        a: DMatrix::zeros(nr, nr),
        a_h: DMatrix::zeros(nr, nr),
        b_r: DMatrix::zeros(nq, nr),
        b_q: DMatrix::zeros(np, nq),
        f_q: DVector::zeros(nq),
        f_r: DVector::zeros(nr),
    };
    for c in 0..mesh.n_cells() {
        let s = simplex(mesh, c);
        let rb = vorticity_basis(mesh, c, &s);
        let qb = rt0_basis(mesh, c, &s);
        for (b, w) in degree2_rule(d) {
            let x = s.point(&b);
            let wv = w * s.vol;
            for bi in &rb {
                for bj in &rb {
                    o.a[(bi.dof, bj.dof)] += wv * dot(&(bi.value)(&b), &(bj.value)(&b)) / mu;
                }
                for (f, _, phi, _) in &qb {
                    o.b_r[(*f, bi.dof)] += wv * dot(&bi.curl, &phi(&x));
                }
            }
            for (f, _, phi, _) in &qb {
                o.f_q[*f] += wv * dot(&g(&x), &phi(&x));
            }
        }
        // vertex rule
        for v in 0..=d {
            let mut b = vec![0.0; d + 1];
            b[v] = 1.0;
            for bi in &rb {
                for bj in &rb {
                    o.a_h[(bi.dof, bj.dof)] +=
                        s.vol / (d + 1) as f64 * dot(&(bi.value)(&b), &(bj.value)(&b)) / mu;
                }
            }
        }
        for (f, _, _, div) in &qb {
            o.b_q[(c, *f)] += div * s.vol;
        }
    }
    // boundary terms on every boundary facet
    for f in 0..mesh.n_facets() {
        if mesh.facet_cells(f).len() != 1 {
            continue;
        }
        let c = mesh.facet_cells(f)[0];
        let s = simplex(mesh, c);
        let fv = mesh.facet_vertices(f).to_vec();
        let opposite = mesh.cell(c).iter().position(|v| !fv.contains(v)).unwrap();
        let n = global_normal(mesh, f);
        let nn = dot(&n, &n).sqrt();
        let mut nu = scale(1.0 / nn, &n);
        if dot(&nu, &sub(mesh.vertex(fv[0]), &s.x[opposite])) < 0.0 {
            nu = scale(-1.0, &nu);
        }
        let measure = if d == 2 { nn } else { nn / 2.0 };
        let rb = vorticity_basis(mesh, c, &s);
        let qb = rt0_basis(mesh, c, &s);
        for (fb, w) in facet_rule(d) {
            let mut x = [0.0; 3];
            let mut bary = vec![0.0; d + 1];
            for (k, &v) in fv.iter().enumerate() {
                let lv = mesh.cell(c).iter().position(|&u| u == v).unwrap();
                bary[lv] = fb[k];
                for m in 0..3 {
                    x[m] += fb[k] * mesh.vertex(v)[m];
                }
            }
            for (qf, _, phi, _) in &qb {
                o.f_q[*qf] -= w * measure * p0(&x) * dot(&nu, &phi(&x));
            }
            for bj in &rb {
                let val = (bj.value)(&bary);
                let nxr = if d == 2 {
                    [nu[1] * val[0], -nu[0] * val[0], 0.0]
                } else {
                    cross(&nu, &val)
                };
                o.f_r[bj.dof] -= w * measure * dot(&q0(&x), &nxr);
            }
        }
    }
    o
}

/// Largest entry deviation of every assembled operator and load vector from
/// the oracle, with affine data and `mu = 0.7`.
pub fn operator_deviations(mesh: SimplicialMesh) -> Vec<(&'static str, f64)> {
    let mesh = Arc::new(mesh);
    let d = mesh.dim();
    let mu = 0.7;
    let r = FeSpace::vorticity(mesh.clone()).unwrap();
    let q = FeSpace::new(mesh.clone(), SpaceKind::RT0).unwrap();
    let p = FeSpace::new(mesh.clone(), SpaceKind::P0).unwrap();

    // affine data keeps every oracle integrand at degree <= 2
    let g = move |x: &V3| {
        [
            1.0 + 2.0 * x[0] - x[1],
            0.5 - x[0] + 3.0 * x[1] + x[2],
            if d == 3 { x[0] - 2.0 * x[2] } else { 0.0 },
        ]
    };
    let p0 = |x: &V3| 0.3 + x[0] - 0.5 * x[1] + 0.2 * x[2];
    let q0 = move |x: &V3| {
        [
            x[1] - 0.4,
            2.0 * x[0] + x[2],
            if d == 3 { 1.0 - x[1] } else { 0.0 },
        ]
    };
    let o = oracle(&mesh, mu, &g, &p0, &q0);

    let gf = FnField::vector(d, 1, g);
    let p0f = FnField::scalar(d, 1, p0);
    let q0f = FnField::vector(d, 1, q0);
    let rhs = assemble_rhs(
        &LoadData {
            g: &gf,
            p0: Some(&p0f),
            q0: Some(&q0f),
            degree: 6,
        },
        &r,
        &q,
    )
    .unwrap();
    let ah = assemble_quadrature_vorticity_mass(&r, mu).unwrap();
    vec![
        (
            "A",
            matrix_deviation(&assemble_exact_vorticity_mass(&r, mu).unwrap(), &o.a),
        ),
        ("A_h", matrix_deviation(&ah.to_sparse(), &o.a_h)),
        (
            "B_r",
            matrix_deviation(&assemble_curl(&r, &q).unwrap(), &o.b_r),
        ),
        (
            "B_q",
            matrix_deviation(&assemble_div(&q, &p).unwrap(), &o.b_q),
        ),
        ("f_q", vector_deviation(&rhs.f_q, &o.f_q)),
        ("f_r", vector_deviation(&rhs.f_r, &o.f_r)),
        ("f_p", rhs.f_p.iter().fold(0.0, |m, v| m.max(v.abs()))),
        ("tr A_h", (ah.trace() - o.a_h.trace()).abs()),
    ]
}
