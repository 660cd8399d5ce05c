//! Regularized least-squares kernel: the inner solve of every reweighed
//! iteration. `min_u ||A u - b||^2 + mu ||u||^2` has the unique solution of
//! `(A^T A + mu I) u = A^T b`; for wide `A` the equivalent dual form
//! `u = A^T (A A^T + mu I)^{-1} b` factors the smaller system.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// Input to the ridge kernel: an `m x s` operator, observations, and a
/// strictly positive regularization weight.
#[derive(Debug, Clone)]
pub struct RidgeInput<'a> {
    pub a: &'a Matrix,
    pub b: &'a [f64],
    pub mu: f64,
}

impl<'a> RidgeInput<'a> {
    pub fn new(a: &'a Matrix, b: &'a [f64], mu: f64) -> Self {
        Self { a, b, mu }
    }

    fn validate(&self) -> Result<()> {
        if self.a.cols() == 0 {
            return Err(Error::Input("ridge operator has no columns".into()));
        }
        if self.b.len() != self.a.rows() {
            return Err(Error::Dimension(format!(
                "ridge rhs length {} does not match {} rows",
                self.b.len(),
                self.a.rows()
            )));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::Input(format!(
                "ridge weight must be positive and finite, got {}",
                self.mu
            )));
        }
        if !self.a.is_finite() || !linalg::all_finite(self.b) {
            return Err(Error::Input("non-finite entries in ridge input".into()));
        }
        Ok(())
    }
}

/// Minimizer of `||A u - b||^2 + mu ||u||^2`.
///
/// Picks the primal path (an `s x s` system) when the operator is tall or
/// square, and the dual path (an `m x m` system) when it is wide, so the
/// factorized system is always the smaller Gram matrix. Both are strictly
/// positive definite for `mu > 0`.
pub fn ridge_solve(input: RidgeInput<'_>) -> Result<Vec<f64>> {
    input.validate()?;
    if input.a.cols() <= input.a.rows() {
        ridge_solve_primal(input)
    } else {
        ridge_solve_dual(input)
    }
}

/// Primal path: solve `(A^T A + mu I) u = A^T b` directly.
pub fn ridge_solve_primal(input: RidgeInput<'_>) -> Result<Vec<f64>> {
    input.validate()?;
    let mut g = input.a.gram();
    g.add_diagonal(input.mu);
    let rhs = input.a.matvec_t(input.b);
    spd_solve(&g, &rhs)
}

/// Dual path: solve `(A A^T + mu I) y = b`, then `u = A^T y`.
pub fn ridge_solve_dual(input: RidgeInput<'_>) -> Result<Vec<f64>> {
    input.validate()?;
    let mut g = input.a.outer_gram();
    g.add_diagonal(input.mu);
    let y = spd_solve(&g, input.b)?;
    Ok(input.a.matvec_t(&y))
}

/// Solve `g y = rhs` for symmetric positive-definite `g` via an unpivoted
/// Cholesky factorization.
///
/// Rejects matrices that are visibly asymmetric, and reports the offending
/// pivot index when the factorization hits a non-positive pivot.
pub fn spd_solve(g: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = g.rows();
    if g.cols() != n {
        return Err(Error::Dimension(format!(
            "spd_solve needs a square matrix, got {}x{}",
            n,
            g.cols()
        )));
    }
    if rhs.len() != n {
        return Err(Error::Dimension(format!(
            "spd_solve rhs length {} does not match order {}",
            rhs.len(),
            n
        )));
    }
    if !g.is_finite() || !linalg::all_finite(rhs) {
        return Err(Error::Input("non-finite entries in spd system".into()));
    }
    let scale = (0..n)
        .flat_map(|c| g.col(c).iter().copied())
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    for i in 0..n {
        for j in (i + 1)..n {
            if (g.get(i, j) - g.get(j, i)).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::Input(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }

    // Lower-triangular factor, built column by column in place.
    let mut l = g.clone();
    for j in 0..n {
        let mut d = l.get(j, j);
        for k in 0..j {
            let v = l.get(j, k);
            d -= v * v;
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::Numeric(format!(
                "non-positive-definite pivot {d:e} at index {j}"
            )));
        }
        let d = libm::sqrt(d);
        l.set(j, j, d);
        for i in (j + 1)..n {
            let mut v = l.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / d);
        }
    }

    // Forward then back substitution.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut v = rhs[i];
        for k in 0..i {
            v -= l.get(i, k) * y[k];
        }
        y[i] = v / l.get(i, i);
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in (i + 1)..n {
            v -= l.get(k, i) * x[k];
        }
        x[i] = v / l.get(i, i);
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spd_identity() {
        let g = Matrix::identity(3);
        let x = spd_solve(&g, &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn spd_diagonal() {
        let g = Matrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]);
        let x = spd_solve(&g, &[2.0, 4.0]).unwrap();
        assert_eq!(x, vec![1.0, 1.0]);
    }

    #[test]
    fn spd_row_sums() {
        let g = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let x = spd_solve(&g, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spd_reports_pivot_index() {
        // Indefinite: second pivot goes negative.
        let g = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        match spd_solve(&g, &[1.0, 1.0]) {
            Err(Error::Numeric(msg)) => assert!(msg.contains("index 1"), "{msg}"),
            other => panic!("expected numeric error, got {other:?}"),
        }
    }

    #[test]
    fn spd_rejects_asymmetric() {
        let g = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]);
        assert!(matches!(spd_solve(&g, &[1.0, 1.0]), Err(Error::Input(_))));
    }

    #[test]
    fn ridge_identity_example() {
        let a = Matrix::identity(2);
        let u = ridge_solve(RidgeInput::new(&a, &[1.0, 0.0], 1.0)).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-15);
        assert_eq!(u[1], 0.0);
    }

    #[test]
    fn ridge_scalar_example() {
        let a = Matrix::from_rows(&[vec![2.0]]);
        let u = ridge_solve(RidgeInput::new(&a, &[8.0], 4.0)).unwrap();
        assert!((u[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ridge_rejects_bad_mu() {
        let a = Matrix::identity(2);
        assert!(ridge_solve(RidgeInput::new(&a, &[1.0, 0.0], 0.0)).is_err());
        assert!(ridge_solve(RidgeInput::new(&a, &[1.0, 0.0], f64::NAN)).is_err());
    }
}
