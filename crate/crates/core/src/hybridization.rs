//! Local elimination of the vorticity.
//!
//! With the vertex quadrature the vorticity mass operator is block diagonal
//! by vertex, so its inverse is computed block by block and the vorticity is
//! condensed out of the three-field system:
//!
//! ```text
//! [ B_r A_h^-1 B_r^T   -B_q^T ] [q]   [ f_q - B_r A_h^-1 f_r ]
//! [ B_q                   0   ] [p] = [ 0                    ]
//! ```
//!
//! and recovered afterwards from `r = A_h^-1 (f_r + B_r^T q)`.

use nalgebra::DMatrix;

use crate::assembly::{RhsVectors, VertexBlock, VertexBlockMatrix};
use crate::error::{FemError, Result};
use crate::sparse::SparseMatrix;

/// Velocity–pressure system left after eliminating the vorticity.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    /// `B_r A_h^-1 B_r^T`, symmetric positive semidefinite.
    pub s: SparseMatrix,
    pub b_q: SparseMatrix,
    pub rhs_q: Vec<f64>,
    pub rhs_p: Vec<f64>,
}

/// Inverts every vertex block through a Cholesky factorization.
pub fn invert_vertex_blocks(a_h: &VertexBlockMatrix) -> Result<VertexBlockMatrix> {
    let blocks = a_h
        .blocks()
        .iter()
        .map(|b| {
            let inv = if b.dofs.is_empty() {
                DMatrix::zeros(0, 0)
            } else {
                b.matrix
                    .clone()
                    .cholesky()
                    .ok_or(FemError::SingularBlock { vertex: b.vertex })?
                    .inverse()
            };
            Ok(VertexBlock {
                vertex: b.vertex,
                dofs: b.dofs.clone(),
                matrix: inv,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VertexBlockMatrix::from_blocks(a_h.n_dofs(), blocks))
}

/// Assembles `S = B_r A_h^-1 B_r^T` from per-vertex outer products and the
/// reduced load `f_q - B_r A_h^-1 f_r`.
pub fn build_reduced_system(
    b_r: &SparseMatrix,
    b_q: &SparseMatrix,
    a_h_inv: &VertexBlockMatrix,
    rhs: &RhsVectors,
) -> Result<ReducedSystem> {
    let n_q = b_r.n_rows();
    let n_r = b_r.n_cols();
    let mismatch = |what, expected, got| FemError::DimensionMismatch {
        what,
        expected,
        got,
    };
    if a_h_inv.n_dofs() != n_r {
        return Err(mismatch("vorticity block operator", n_r, a_h_inv.n_dofs()));
    }
    if b_q.n_cols() != n_q {
        return Err(mismatch("divergence columns", n_q, b_q.n_cols()));
    }
    if rhs.f_r.len() != n_r {
        return Err(mismatch("vorticity load", n_r, rhs.f_r.len()));
    }
    if rhs.f_q.len() != n_q {
        return Err(mismatch("velocity load", n_q, rhs.f_q.len()));
    }

    // Columns of B_r, i.e. rows of B_r^T.
    let b_rt = b_r.transpose();
    let mut triplets = Vec::new();
    let mut rows: Vec<usize> = Vec::new();
    for block in a_h_inv.blocks() {
        let nd = block.dofs.len();
        if nd == 0 {
            continue;
        }
        rows.clear();
        for &j in &block.dofs {
            rows.extend_from_slice(b_rt.row(j).0);
        }
        rows.sort_unstable();
        rows.dedup();
        // W = B_r[rows, dofs]
        let mut w = DMatrix::<f64>::zeros(rows.len(), nd);
        for (l, &j) in block.dofs.iter().enumerate() {
            let (cols, vals) = b_rt.row(j);
            for (&i, &v) in cols.iter().zip(vals) {
                let k = rows.binary_search(&i).unwrap();
                w[(k, l)] = v;
            }
        }
        let local = &w * &block.matrix * w.transpose();
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in rows.iter().enumerate() {
                triplets.push((i, j, local[(a, b)]));
            }
        }
    }
    let s = SparseMatrix::from_triplets(n_q, n_q, &triplets);

    let correction = b_r.matvec(&a_h_inv.apply(&rhs.f_r));
    let rhs_q = rhs
        .f_q
        .iter()
        .zip(&correction)
        .map(|(f, c)| f - c)
        .collect();
    Ok(ReducedSystem {
        s,
        b_q: b_q.clone(),
        rhs_q,
        rhs_p: vec![0.0; b_q.n_rows()],
    })
}

/// Recovers the vorticity `r = A_h^-1 (f_r + B_r^T q)`.
pub fn reconstruct_vorticity(
    a_h_inv: &VertexBlockMatrix,
    b_r: &SparseMatrix,
    f_r: &[f64],
    q_h: &[f64],
) -> Vec<f64> {
    let mut t = b_r.matvec_transpose(q_h);
    for (ti, fi) in t.iter_mut().zip(f_r) {
        *ti += fi;
    }
    a_h_inv.apply(&t)
}
