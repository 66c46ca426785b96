//! Sparse direct solves of the saddle-point systems.
//!
//! Systems are stored in symmetric form. The three-field system
//!
//! ```text
//! [  A    -B_r^T   0    ] [r]   [  f_r ]
//! [ -B_r   0       B_q^T] [q] = [ -f_q ]
//! [  0     B_q     0    ] [p]   [  0   ]
//! ```
//!
//! is the weak form with the momentum row negated; the reduced system is
//! `[[S, -B_q^T], [-B_q, 0]]` with load `[f_q - B_r A_h^-1 f_r, 0]`.
//! Factorization is a fill-reducing sparse LU with partial pivoting
//! followed by a few steps of iterative refinement.

use std::sync::Once;

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::assembly::{apply_essential_bc, RhsVectors};
use crate::error::{FemError, Result};
use crate::hybridization::ReducedSystem;
use crate::sparse::SparseMatrix;

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

const MAX_REFINEMENT_STEPS: usize = 4;

/// A symmetric (indefinite) block system.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub matrix: SparseMatrix,
    pub rhs: Vec<f64>,
    /// Block start offsets, ending with the total size.
    pub offsets: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub x: Vec<f64>,
    /// Relative residual `|Mx - b| / |b|` (absolute when `b = 0`).
    pub residual: f64,
    pub history: Vec<f64>,
}

impl SaddleSystem {
    pub fn new(matrix: SparseMatrix, rhs: Vec<f64>, offsets: Vec<usize>) -> Result<Self> {
        if matrix.n_rows() != matrix.n_cols() || rhs.len() != matrix.n_rows() {
            return Err(FemError::DimensionMismatch {
                what: "saddle system size",
                expected: matrix.n_rows(),
                got: rhs.len(),
            });
        }
        Ok(SaddleSystem {
            matrix,
            rhs,
            offsets,
        })
    }

    /// Three-field system with vorticity mass `a` (exact or quadrature).
    pub fn three_field(
        a: &SparseMatrix,
        b_r: &SparseMatrix,
        b_q: &SparseMatrix,
        rhs: &RhsVectors,
    ) -> Result<Self> {
        let (nr, nq, np) = (a.n_rows(), b_r.n_rows(), b_q.n_rows());
        let b_rt = b_r.transpose();
        let b_qt = b_q.transpose();
        let matrix = SparseMatrix::from_blocks(
            &[nr, nq, np],
            &[nr, nq, np],
            &[
                (0, 0, a, 1.0),
                (0, 1, &b_rt, -1.0),
                (1, 0, b_r, -1.0),
                (1, 2, &b_qt, 1.0),
                (2, 1, b_q, 1.0),
            ],
        )?;
        let mut b = rhs.f_r.clone();
        b.extend(rhs.f_q.iter().map(|v| -v));
        b.extend(&rhs.f_p);
        Self::new(matrix, b, vec![0, nr, nr + nq, nr + nq + np])
    }

    /// Velocity–pressure system after vorticity elimination.
    pub fn reduced(sys: &ReducedSystem) -> Result<Self> {
        let (nq, np) = (sys.s.n_rows(), sys.b_q.n_rows());
        let b_qt = sys.b_q.transpose();
        let matrix = SparseMatrix::from_blocks(
            &[nq, np],
            &[nq, np],
            &[
                (0, 0, &sys.s, 1.0),
                (0, 1, &b_qt, -1.0),
                (1, 0, &sys.b_q, -1.0),
            ],
        )?;
        let mut b = sys.rhs_q.clone();
        b.extend(sys.rhs_p.iter().map(|v| -v));
        Self::new(matrix, b, vec![0, nq, nq + np])
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn with_essential(&self, flags: &[bool]) -> Result<Self> {
        let (matrix, rhs) = apply_essential_bc(&self.matrix, &self.rhs, flags)?;
        Self::new(matrix, rhs, self.offsets.clone())
    }

    /// Slice of `x` belonging to block `k`.
    pub fn block<'a>(&self, x: &'a [f64], k: usize) -> &'a [f64] {
        &x[self.offsets[k]..self.offsets[k + 1]]
    }
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn relative_residual(m: &SparseMatrix, x: &[f64], b: &[f64], b_norm: f64) -> (Vec<f64>, f64) {
    let mx = m.matvec(x);
    let r: Vec<f64> = b.iter().zip(&mx).map(|(bi, mi)| bi - mi).collect();
    let n = norm2(&r);
    (r, if b_norm > 0.0 { n / b_norm } else { n })
}

/// Solves `M x = b` to relative residual `tol`.
pub fn solve_saddle(system: &SaddleSystem, tol: f64) -> Result<SolveOutput> {
    static SEQUENTIAL: Once = Once::new();
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));

    let n = system.dim();
    let b_norm = norm2(&system.rhs);
    if b_norm == 0.0 {
        return Ok(SolveOutput {
            x: vec![0.0; n],
            residual: 0.0,
            history: vec![0.0],
        });
    }
    let triplets: Vec<Triplet<usize, usize, f64>> = system
        .matrix
        .triplets()
        .map(|(i, j, v)| Triplet::new(i, j, v))
        .collect();
    let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| FemError::SingularFactorization(format!("{e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| FemError::SingularFactorization(format!("{e:?}")))?;

    let solve = |rhs: &[f64]| -> Vec<f64> {
        let b = Mat::<f64>::from_fn(n, 1, |i, _| rhs[i]);
        let x = faer::linalg::solvers::Solve::solve(&lu, &b);
        (0..n).map(|i| x[(i, 0)]).collect()
    };

    let mut x = solve(&system.rhs);
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(FemError::SingularFactorization(format!(
            "non-finite solution entry at index {i}"
        )));
    }
    let (mut r, mut res) = relative_residual(&system.matrix, &x, &system.rhs, b_norm);
    let mut history = vec![res];
    for _ in 0..MAX_REFINEMENT_STEPS {
        if res <= tol * 1e-3 {
            break;
        }
        let dx = solve(&r);
        let trial: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let (r2, res2) = relative_residual(&system.matrix, &trial, &system.rhs, b_norm);
        if res2 >= res {
            break;
        }
        x = trial;
        r = r2;
        res = res2;
        history.push(res);
    }
    if res > tol || !res.is_finite() {
        return Err(FemError::SolverNotConverged { tol, history });
    }
    Ok(SolveOutput {
        x,
        residual: res,
        history,
    })
}
