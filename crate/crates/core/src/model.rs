//! Shared domain types: measurement problems, sparse signals, solve results.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

/// A linear measurement problem `phi * x = b`, optionally carrying the
/// planted signal it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    phi: Matrix,
    b: Vec<f64>,
    ground_truth: Option<Vec<f64>>,
    label: Option<String>,
}

impl Problem {
    /// Validates dimensions and finiteness: `phi` is `m x n` with
    /// `m, n >= 1` and `b` has length `m`.
    pub fn new(phi: Matrix, b: Vec<f64>) -> Result<Self> {
        if phi.rows() == 0 || phi.cols() == 0 {
            return Err(Error::Input(format!(
                "measurement matrix must be at least 1x1, got {}x{}",
                phi.rows(),
                phi.cols()
            )));
        }
        if b.len() != phi.rows() {
            return Err(Error::Dimension(format!(
                "observation length {} does not match {} matrix rows",
                b.len(),
                phi.rows()
            )));
        }
        if !phi.is_finite() || !linalg::all_finite(&b) {
            return Err(Error::Input("non-finite entries in problem data".into()));
        }
        Ok(Self {
            phi,
            b,
            ground_truth: None,
            label: None,
        })
    }

    /// Attach the planted signal; its length must equal the column count.
    pub fn with_ground_truth(mut self, truth: Vec<f64>) -> Result<Self> {
        if truth.len() != self.n() {
            return Err(Error::Dimension(format!(
                "ground truth length {} does not match {} columns",
                truth.len(),
                self.n()
            )));
        }
        if !linalg::all_finite(&truth) {
            return Err(Error::Input("non-finite entries in ground truth".into()));
        }
        self.ground_truth = Some(truth);
        Ok(self)
    }

    pub fn with_label(mut self, label: String) -> Self {
        self.label = Some(label);
        self
    }

    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Number of measurements (rows).
    pub fn m(&self) -> usize {
        self.phi.rows()
    }

    /// Signal dimension (columns).
    pub fn n(&self) -> usize {
        self.phi.cols()
    }

    pub fn ground_truth(&self) -> Option<&[f64]> {
        self.ground_truth.as_deref()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// `||phi * truth - b|| / ||b||` for planted problems (`None` without a
    /// ground truth). Noiseless constructions keep this at rounding level.
    pub fn planted_residual(&self) -> Option<f64> {
        let truth = self.ground_truth.as_ref()?;
        let r = linalg::dist2(&self.phi.matvec(truth), &self.b);
        let bn = linalg::norm2(&self.b);
        Some(if bn == 0.0 { r } else { r / bn })
    }
}

/// A signal together with its support.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    values: Vec<f64>,
    support: Vec<usize>,
    sparsity_k: usize,
}

impl SparseSignal {
    /// Derive support (sorted indices of nonzero entries) from a dense vector.
    pub fn from_dense(values: Vec<f64>) -> Self {
        let support: Vec<usize> = values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
            .collect();
        let sparsity_k = support.len();
        Self {
            values,
            support,
            sparsity_k,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn sparsity_k(&self) -> usize {
        self.sparsity_k
    }
}

/// Outcome of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Recovered signal estimate.
    pub x_hat: Vec<f64>,
    /// Final internal iterate (equals `x_hat` for solvers without one).
    pub u_final: Vec<f64>,
    /// Update steps performed.
    pub iterations: usize,
    /// Whether the stopping rule fired before the iteration cap.
    pub converged: bool,
    /// `||phi * x_hat - b||_2`.
    pub residual_norm: f64,
    /// Per-iteration signal estimates, one row per iteration, when recorded.
    pub trace: Option<Vec<Vec<f64>>>,
}

/// `||x_hat - x_true|| / ||x_true||`, falling back to `||x_hat||` when the
/// reference signal is identically zero.
pub fn relative_error(x_hat: &[f64], x_true: &[f64]) -> Result<f64> {
    if x_hat.len() != x_true.len() {
        return Err(Error::Dimension(format!(
            "relative_error on lengths {} and {}",
            x_hat.len(),
            x_true.len()
        )));
    }
    let denom = linalg::norm2(x_true);
    if denom == 0.0 {
        return Ok(linalg::norm2(x_hat));
    }
    Ok(linalg::dist2(x_hat, x_true) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn relative_error_identity_case() {
        assert_eq!(relative_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
    }

    #[test]
    fn relative_error_zero_estimate() {
        assert_eq!(relative_error(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 1.0);
    }

    #[test]
    fn relative_error_zero_truth_fallback() {
        assert_eq!(
            relative_error(&[1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]).unwrap(),
            1.0
        );
    }

    #[test]
    fn relative_error_length_mismatch() {
        assert!(matches!(
            relative_error(&[1.0], &[1.0, 2.0]),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn problem_validation() {
        let phi = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert!(Problem::new(phi.clone(), vec![1.0]).is_err());
        assert!(Problem::new(phi.clone(), vec![1.0, f64::NAN]).is_err());
        let p = Problem::new(phi, vec![1.0, 2.0]).unwrap();
        assert_eq!(p.m(), 2);
        assert_eq!(p.n(), 2);
        assert!(p.clone().with_ground_truth(vec![0.0; 3]).is_err());
        let p = p.with_ground_truth(vec![1.0, 2.0]).unwrap();
        assert!(p.planted_residual().unwrap() < 1e-15);
    }

    #[test]
    fn sparse_signal_support() {
        let s = SparseSignal::from_dense(vec![0.0, 2.0, 0.0, -1.0]);
        assert_eq!(s.support(), &[1, 3]);
        assert_eq!(s.sparsity_k(), 2);
    }
}
