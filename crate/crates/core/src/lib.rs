//! Sparse-signal recovery from underdetermined linear measurements.
//!
//! The centrepiece is an iteratively reweighed operator solver: instead of
//! penalizing the signal with an `l_p` term, each iteration reweighs the
//! measurement matrix itself by a diagonal built from the previous iterate
//! and solves a small ridge subproblem. Components that stay small are
//! pruned, so the working subspace shrinks as the signal comes into focus.
//!
//! The crate also ships the classic baselines the solver is usually compared
//! against (normalized iterative hard thresholding, IRLS for `l_p`
//! minimization, ISTA for the `l_1`-penalized least squares), a brute-force
//! sparsest-solution oracle for desk-scale ground truth, and a seeded
//! generator for Gaussian random problem ensembles.
//!
//! The crate is `no_std` (with `alloc`); IO, plotting, and the benchmark
//! harness live in the companion CLI crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod baselines;
pub mod ensemble;
pub mod error;
pub mod iroa;
pub mod linalg;
pub mod model;
pub mod ridge;

pub use error::{Error, Result};
pub use linalg::Matrix;
pub use model::{relative_error, Problem, SolveResult, SparseSignal};
