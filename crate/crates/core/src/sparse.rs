//! Compressed sparse row matrices.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{FemError, Result};

/// Real sparse matrix in CSR form with sorted, duplicate-free rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets, summing duplicates
    /// in input order.
    pub fn from_triplets(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));
        let mut row_ptr = vec![0; n_rows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for k in order {
            let (i, j, v) = triplets[k];
            assert!(i < n_rows && j < n_cols, "triplet ({i}, {j}) out of bounds");
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(j);
                values.push(v);
                row_ptr[i + 1] += 1;
                last = Some((i, j));
            }
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self::from_triplets(n_rows, n_cols, &[])
    }

    pub fn identity(n: usize) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, 1.0)).collect();
        Self::from_triplets(n, n, &t)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_rows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_cols);
        (0..self.n_rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// `A^T x`.
    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n_rows);
        let mut y = vec![0.0; self.n_cols];
        for i in 0..self.n_rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += v * x[i];
            }
        }
        y
    }

    pub fn transpose(&self) -> SparseMatrix {
        let t: Vec<_> = self.triplets().map(|(i, j, v)| (j, i, v)).collect();
        Self::from_triplets(self.n_cols, self.n_rows, &t)
    }

    pub fn scaled(&self, alpha: f64) -> SparseMatrix {
        let mut m = self.clone();
        for v in &mut m.values {
            *v *= alpha;
        }
        m
    }

    /// Largest `|A_ij - A_ji|` over the stored pattern of both.
    pub fn asymmetry(&self) -> f64 {
        if self.n_rows != self.n_cols {
            return f64::INFINITY;
        }
        self.triplets()
            .map(|(i, j, v)| (v - self.get(j, i)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n_cols]; self.n_rows];
        for (i, j, v) in self.triplets() {
            d[i][j] += v;
        }
        d
    }

    /// Assembles a block matrix. Each entry is `(block_row, block_col, matrix, scale)`.
    pub fn from_blocks(
        row_sizes: &[usize],
        col_sizes: &[usize],
        blocks: &[(usize, usize, &SparseMatrix, f64)],
    ) -> Result<SparseMatrix> {
        let offsets = |sizes: &[usize]| {
            let mut o = vec![0];
            for s in sizes {
                o.push(o.last().unwrap() + s);
            }
            o
        };
        let (ro, co) = (offsets(row_sizes), offsets(col_sizes));
        let mut t = Vec::new();
        for &(bi, bj, m, scale) in blocks {
            if m.n_rows != row_sizes[bi] || m.n_cols != col_sizes[bj] {
                return Err(FemError::DimensionMismatch {
                    what: "block shape",
                    expected: row_sizes[bi] * col_sizes[bj],
                    got: m.n_rows * m.n_cols,
                });
            }
            t.extend(
                m.triplets()
                    .map(|(i, j, v)| (ro[bi] + i, co[bj] + j, scale * v)),
            );
        }
        Ok(Self::from_triplets(
            *ro.last().unwrap(),
            *co.last().unwrap(),
            &t,
        ))
    }

    /// Zeroes the columns flagged in `cols`.
    pub fn zero_columns(&self, cols: &[bool]) -> SparseMatrix {
        let mut m = self.clone();
        for (k, &j) in m.col_idx.iter().enumerate() {
            if cols[j] {
                m.values[k] = 0.0;
            }
        }
        m
    }

    /// Zeroes the rows flagged in `rows`.
    pub fn zero_rows(&self, rows: &[bool]) -> SparseMatrix {
        let mut m = self.clone();
        for i in 0..m.n_rows {
            if rows[i] {
                for k in m.row_ptr[i]..m.row_ptr[i + 1] {
                    m.values[k] = 0.0;
                }
            }
        }
        m
    }

    /// Writes `row col value` lines (0-based indices, full precision).
    pub fn write_coordinate(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| FemError::io(path, e))?;
        let mut w = BufWriter::new(file);
        (|| -> std::io::Result<()> {
            writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
            for (i, j, v) in self.triplets() {
                writeln!(w, "{i} {j} {v:.17e}")?;
            }
            w.flush()
        })()
        .map_err(|e| FemError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = SparseMatrix::from_triplets(2, 3, &[(0, 1, 1.0), (1, 2, 2.0), (0, 1, 0.5)]);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 1.5);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.matvec(&[1.0, 2.0, 3.0]), vec![3.0, 6.0]);
        assert_eq!(m.matvec_transpose(&[1.0, 1.0]), vec![0.0, 1.5, 2.0]);
        assert_eq!(m.transpose().transpose(), m);
    }

    #[test]
    fn block_assembly() {
        let a = SparseMatrix::identity(2);
        let b = SparseMatrix::from_triplets(1, 2, &[(0, 0, 3.0)]);
        let m = SparseMatrix::from_blocks(&[2, 1], &[2, 1], &[(0, 0, &a, 1.0), (1, 0, &b, -1.0)])
            .unwrap();
        assert_eq!(m.get(2, 0), -3.0);
        assert_eq!(m.get(1, 1), 1.0);
        assert!(SparseMatrix::from_blocks(&[2], &[2], &[(0, 0, &b, 1.0)]).is_err());
    }

    #[test]
    fn coordinate_dump() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        SparseMatrix::from_triplets(2, 2, &[(1, 0, 0.25)])
            .write_coordinate(&path)
            .unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("1 0 2.5"));
    }
}
