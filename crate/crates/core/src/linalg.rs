//! Dense column-major matrices and the handful of vector kernels the
//! solvers need. Problem sizes here are small (hundreds of columns), so
//! everything is a plain loop over contiguous storage.

use alloc::vec;
use alloc::vec::Vec;

/// Dense real matrix with column-major storage.
///
/// Column access dominates in the solvers (reweighing scales columns,
/// pruning drops them), so columns are kept contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// All-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Build from a closure over `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m.data[c * rows + r] = f(r, c);
            }
        }
        m
    }

    /// Build from row slices. Panics if the rows are ragged.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged rows");
        }
        Self::from_fn(nrows, ncols, |r, c| rows[r][c])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[c * self.rows + r] = v;
    }

    /// Contiguous view of column `c`.
    #[inline]
    pub fn col(&self, c: usize) -> &[f64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    /// `y = A x` (length `rows`).
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension");
        let mut y = vec![0.0; self.rows];
        for (c, &xc) in x.iter().enumerate() {
            if xc == 0.0 {
                continue;
            }
            for (yi, &a) in y.iter_mut().zip(self.col(c)) {
                *yi += a * xc;
            }
        }
        y
    }

    /// `y = A^T x` (length `cols`).
    pub fn matvec_t(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "matvec_t dimension");
        (0..self.cols).map(|c| dot(self.col(c), x)).collect()
    }

    /// Gram matrix `A^T A` (`cols x cols`).
    pub fn gram(&self) -> Matrix {
        let s = self.cols;
        let mut g = Matrix::zeros(s, s);
        for i in 0..s {
            for j in i..s {
                let v = dot(self.col(i), self.col(j));
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    }

    /// Outer Gram matrix `A A^T` (`rows x rows`), accumulated column by column.
    pub fn outer_gram(&self) -> Matrix {
        let m = self.rows;
        let mut g = Matrix::zeros(m, m);
        for c in 0..self.cols {
            let col = self.col(c);
            for j in 0..m {
                let cj = col[j];
                if cj == 0.0 {
                    continue;
                }
                let gcol = g.col_mut(j);
                for i in 0..m {
                    gcol[i] += col[i] * cj;
                }
            }
        }
        g
    }

    /// Copy of the columns listed in `idx`, in that order.
    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, idx.len());
        for (k, &c) in idx.iter().enumerate() {
            out.col_mut(k).copy_from_slice(self.col(c));
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Add `v` to every diagonal entry.
    pub fn add_diagonal(&mut self, v: f64) {
        let n = self.rows.min(self.cols);
        for i in 0..n {
            let cur = self.get(i, i);
            self.set(i, i, cur + v);
        }
    }
}

/// Inner product; panics on length mismatch.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dot dimension");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// `a - b` elementwise; panics on length mismatch.
pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    assert_eq!(a.len(), b.len(), "sub dimension");
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `||a - b||_2` without materializing the difference.
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "dist2 dimension");
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Signed integer power by repeated multiplication (`n` is small here).
#[inline]
pub fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
    }
    acc
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|v| v.is_finite())
}
