//! Baseline solvers: normalized iterative hard thresholding, IRLS for
//! `l_p` minimization under the equality constraint, ISTA for the
//! `l_1`-penalized least squares, and a brute-force sparsest-solution
//! oracle for desk-scale instances.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{Problem, SolveResult};
use crate::ridge::spd_solve;

/// Parameters for normalized iterative hard thresholding.
#[derive(Debug, Clone, PartialEq)]
pub struct IhtConfig {
    /// Target sparsity: every iterate keeps at most this many entries.
    pub sparsity_k: usize,
    pub max_iters: usize,
    /// Stop when `||b - phi u|| / ||b||` drops below this.
    pub tol: f64,
    pub record_trace: bool,
}

impl IhtConfig {
    pub fn new(sparsity_k: usize) -> Self {
        Self {
            sparsity_k,
            max_iters: 500,
            tol: 1e-6,
            record_trace: false,
        }
    }
}

/// Parameters for the iteratively reweighted least-squares baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct IrlsConfig {
    /// Exponent of the `l_p` objective, in `(0, 1]`.
    pub p_norm: f64,
    /// Initial smoothing added inside the weights.
    pub eps_smooth: f64,
    /// Smallest smoothing value the schedule may reach.
    pub eps_floor: f64,
    pub max_iters: usize,
    pub record_trace: bool,
}

impl Default for IrlsConfig {
    fn default() -> Self {
        Self {
            p_norm: 1.0,
            eps_smooth: 1.0,
            eps_floor: 1e-8,
            max_iters: 200,
            record_trace: false,
        }
    }
}

impl IrlsConfig {
    pub fn with_p_norm(p_norm: f64) -> Self {
        Self {
            p_norm,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p_norm > 0.0 && self.p_norm <= 1.0) {
            return Err(Error::Input(format!(
                "p_norm must lie in (0, 1], got {}",
                self.p_norm
            )));
        }
        if !(self.eps_smooth > 0.0) || !(self.eps_floor > 0.0) || self.eps_floor >= self.eps_smooth
        {
            return Err(Error::Input(
                "smoothing must satisfy 0 < eps_floor < eps_smooth".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(Error::Input("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Indices of the `k` largest-magnitude entries, ties broken by lower index.
fn top_k_indices(v: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| {
        v[b].abs()
            .total_cmp(&v[a].abs())
            .then_with(|| a.cmp(&b))
    });
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Keep the `k` largest-magnitude entries of `v`, zero the rest.
fn hard_threshold(v: &[f64], k: usize) -> Vec<f64> {
    let keep = top_k_indices(v, k);
    let mut out = vec![0.0; v.len()];
    for i in keep {
        out[i] = v[i];
    }
    out
}

fn support(v: &[f64]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, x)| **x != 0.0)
        .map(|(i, _)| i)
        .collect()
}

/// Normalized iterative hard thresholding from the zero start.
///
/// Each iteration takes a gradient step with the adaptive step size
/// `||g_T||^2 / ||phi_T g_T||^2` computed on the current support `T`, then
/// keeps the `K` largest entries. If the proposal moves the support and does
/// not decrease the residual, the step is halved until one of the two holds.
pub fn iht_solve(problem: &Problem, config: &IhtConfig) -> Result<SolveResult> {
    let n = problem.n();
    if config.sparsity_k == 0 || config.sparsity_k > n {
        return Err(Error::Input(format!(
            "sparsity target {} out of range 1..={}",
            config.sparsity_k, n
        )));
    }
    if config.max_iters == 0 || !(config.tol > 0.0) {
        return Err(Error::Input("iht needs positive max_iters and tol".into()));
    }
    let phi = problem.phi();
    let b = problem.b();
    let b_norm = linalg::norm2(b);
    let k = config.sparsity_k;

    let mut u = vec![0.0; n];
    let mut trace = config.record_trace.then(Vec::new);
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..config.max_iters {
        let residual = linalg::sub(b, &phi.matvec(&u));
        let res_norm = linalg::norm2(&residual);
        if res_norm <= config.tol * b_norm {
            converged = true;
            break;
        }
        let g = phi.matvec_t(&residual);
        let t = {
            let s = support(&u);
            if s.is_empty() {
                top_k_indices(&g, k)
            } else {
                s
            }
        };
        let g_t: Vec<f64> = t.iter().map(|&i| g[i]).collect();
        let num = linalg::dot(&g_t, &g_t);
        let phi_g: Vec<f64> = phi.select_cols(&t).matvec(&g_t);
        let den = linalg::dot(&phi_g, &phi_g);
        if num == 0.0 || den == 0.0 {
            // The restricted gradient cannot move the iterate.
            converged = true;
            break;
        }
        let mut alpha = num / den;

        let stepped = |a: f64| -> Vec<f64> {
            let moved: Vec<f64> = u.iter().zip(&g).map(|(ui, gi)| ui + a * gi).collect();
            hard_threshold(&moved, k)
        };
        let mut proposal = stepped(alpha);
        if support(&proposal) != t {
            loop {
                let prop_res = linalg::dist2(&phi.matvec(&proposal), b);
                if prop_res < res_norm {
                    break;
                }
                alpha /= 2.0;
                if alpha < 1e-300 {
                    break;
                }
                proposal = stepped(alpha);
                if support(&proposal) == t {
                    break;
                }
            }
        }
        u = proposal;
        iterations += 1;
        if let Some(tr) = trace.as_mut() {
            tr.push(u.clone());
        }
    }

    let residual_norm = linalg::dist2(&phi.matvec(&u), b);
    Ok(SolveResult {
        u_final: u.clone(),
        x_hat: u,
        iterations,
        converged,
        residual_norm,
        trace,
    })
}

/// IRLS for `min ||u||_p^p` subject to `phi u = b`, via weighted minimum-norm
/// solves `u = V phi^T (phi V phi^T)^{-1} b` with `V = diag((u_i^2 +
/// eps^2)^{(2-p)/2})`, starting from the unweighted minimum-norm solution.
///
/// The smoothing `eps` is divided by 10 whenever the relative change of the
/// iterate drops below `sqrt(eps)`, flooring at `eps_floor`; the run stops at
/// the floor once the relative change is below `1e-8`.
pub fn irls_solve(problem: &Problem, config: &IrlsConfig) -> Result<SolveResult> {
    config.validate()?;
    let (m, n) = (problem.m(), problem.n());
    if m >= n {
        return Err(Error::Input(format!(
            "irls expects an underdetermined system, got {m}x{n}"
        )));
    }
    let phi = problem.phi();
    let b = problem.b();

    if linalg::norm2(b) == 0.0 {
        return Ok(SolveResult {
            x_hat: vec![0.0; n],
            u_final: vec![0.0; n],
            iterations: 0,
            converged: true,
            residual_norm: 0.0,
            trace: config.record_trace.then(Vec::new),
        });
    }

    // phi V phi^T assembled column by column; V is diagonal.
    let weighted_minnorm = |v: &[f64]| -> Result<Vec<f64>> {
        let mut g = Matrix::zeros(m, m);
        for c in 0..n {
            let col = phi.col(c);
            let vc = v[c];
            for j in 0..m {
                let s = vc * col[j];
                if s == 0.0 {
                    continue;
                }
                let gcol = g.col_mut(j);
                for i in 0..m {
                    gcol[i] += col[i] * s;
                }
            }
        }
        let y = spd_solve(&g, b).map_err(|e| match e {
            Error::Numeric(msg) => Error::Numeric(format!(
                "weighted Gram matrix is rank-deficient ({msg})"
            )),
            other => other,
        })?;
        let mut u = phi.matvec_t(&y);
        for (ui, vi) in u.iter_mut().zip(v) {
            *ui *= vi;
        }
        Ok(u)
    };

    let mut u = weighted_minnorm(&vec![1.0; n])?;
    let mut trace = config.record_trace.then(|| vec![u.clone()]);
    let mut eps = config.eps_smooth;
    let exponent = (2.0 - config.p_norm) / 2.0;
    let mut iterations = 0;
    let mut converged = false;

    for _ in 0..config.max_iters {
        let v: Vec<f64> = u
            .iter()
            .map(|&ui| libm::pow(ui * ui + eps * eps, exponent))
            .collect();
        let u_next = weighted_minnorm(&v)?;
        let prev_norm = linalg::norm2(&u);
        let change = if prev_norm == 0.0 {
            linalg::norm2(&u_next)
        } else {
            linalg::dist2(&u_next, &u) / prev_norm
        };
        u = u_next;
        iterations += 1;
        if let Some(tr) = trace.as_mut() {
            tr.push(u.clone());
        }
        let at_floor = eps <= config.eps_floor;
        if change < libm::sqrt(eps) {
            eps = (eps / 10.0).max(config.eps_floor);
        }
        if at_floor && change < 1e-8 {
            converged = true;
            break;
        }
    }

    let residual_norm = linalg::dist2(&phi.matvec(&u), b);
    Ok(SolveResult {
        u_final: u.clone(),
        x_hat: u,
        iterations,
        converged,
        residual_norm,
        trace,
    })
}

/// ISTA for `min mu ||u||_1 + ||phi u - b||^2` with the fixed step `1/L`,
/// where `L` bounds the largest eigenvalue of `phi^T phi` (50 power-method
/// iterations, inflated by 1%). Stops when the objective's relative decrease
/// falls below `tol`.
pub fn ista_solve(problem: &Problem, mu: f64, max_iters: usize, tol: f64) -> Result<SolveResult> {
    ista_impl(problem, mu, max_iters, tol, false)
}

/// [`ista_solve`] with the per-iteration estimates recorded.
pub fn ista_solve_traced(
    problem: &Problem,
    mu: f64,
    max_iters: usize,
    tol: f64,
) -> Result<SolveResult> {
    ista_impl(problem, mu, max_iters, tol, true)
}

fn ista_impl(
    problem: &Problem,
    mu: f64,
    max_iters: usize,
    tol: f64,
    record_trace: bool,
) -> Result<SolveResult> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Input(format!("ista weight must be positive, got {mu}")));
    }
    if max_iters == 0 || !(tol > 0.0) {
        return Err(Error::Input("ista needs positive max_iters and tol".into()));
    }
    let phi = problem.phi();
    let b = problem.b();
    let n = problem.n();

    let lipschitz = gram_spectral_bound(phi);
    let mut u = vec![0.0; n];
    let mut trace = record_trace.then(Vec::new);
    let objective = |u: &[f64]| -> f64 {
        let fit = linalg::dist2(&phi.matvec(u), b);
        mu * u.iter().map(|v| v.abs()).sum::<f64>() + fit * fit
    };
    let mut f_prev = objective(&u);
    let mut iterations = 0;
    let mut converged = f_prev == 0.0 || lipschitz == 0.0;

    if !converged {
        let step = 1.0 / lipschitz;
        let threshold = step * mu / 2.0;
        for _ in 0..max_iters {
            let grad = phi.matvec_t(&linalg::sub(&phi.matvec(&u), b));
            for (ui, gi) in u.iter_mut().zip(&grad) {
                let v = *ui - step * gi;
                *ui = v.signum() * (v.abs() - threshold).max(0.0);
            }
            iterations += 1;
            if let Some(tr) = trace.as_mut() {
                tr.push(u.clone());
            }
            let f = objective(&u);
            if f == 0.0 || (f_prev - f) < tol * f_prev {
                converged = true;
                break;
            }
            f_prev = f;
        }
    }

    let residual_norm = linalg::dist2(&phi.matvec(&u), b);
    Ok(SolveResult {
        u_final: u.clone(),
        x_hat: u,
        iterations,
        converged,
        residual_norm,
        trace,
    })
}

/// Upper bound on the largest eigenvalue of `phi^T phi`: 50 power-method
/// iterations from a deterministic start, inflated by 1%.
fn gram_spectral_bound(phi: &Matrix) -> f64 {
    let n = phi.cols();
    let mut v = vec![1.0 / libm::sqrt(n as f64); n];
    let mut eig = 0.0;
    for _ in 0..50 {
        let w = phi.matvec_t(&phi.matvec(&v));
        let norm = linalg::norm2(&w);
        if norm == 0.0 {
            return 0.0;
        }
        eig = norm;
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / norm;
        }
    }
    eig * 1.01
}

/// Sparsest solution found by exhaustive support enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct SparsestSolution {
    /// Full-length signal with the best-fitting values on the winning support.
    pub signal: Vec<f64>,
    /// Support size at which the first fit was found.
    pub sparsity: usize,
    /// Whether exactly one support of that size fits the observations.
    pub unique: bool,
}

/// Enumerate all supports of size `1..=k_max` in increasing size and return
/// the first size at which some support reproduces `b` to `1e-9` relative,
/// together with a uniqueness flag. Returns `Ok(None)` when no support fits.
///
/// Guarded to `n <= 32` and `k_max <= 4`; beyond that the enumeration is no
/// longer a desk-scale oracle.
pub fn brute_force_sparsest(problem: &Problem, k_max: usize) -> Result<Option<SparsestSolution>> {
    let n = problem.n();
    if n > 32 {
        return Err(Error::Input(format!(
            "oracle is limited to 32 columns, got {n}"
        )));
    }
    if k_max == 0 || k_max > 4 {
        return Err(Error::Input(format!(
            "oracle support size must lie in 1..=4, got {k_max}"
        )));
    }
    let phi = problem.phi();
    let b = problem.b();
    let b_norm = linalg::norm2(b);
    if b_norm == 0.0 {
        return Ok(Some(SparsestSolution {
            signal: vec![0.0; n],
            sparsity: 0,
            unique: true,
        }));
    }
    let tol = 1e-9 * b_norm;

    for size in 1..=k_max.min(n) {
        let mut hits = 0usize;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for_each_combination(n, size, |supp| {
            let sub = phi.select_cols(supp);
            let gram = sub.gram();
            let rhs = sub.matvec_t(b);
            // Degenerate subcolumns cannot produce a fit; skip them.
            let Ok(coeffs) = spd_solve(&gram, &rhs) else {
                return;
            };
            let residual = linalg::dist2(&sub.matvec(&coeffs), b);
            if residual <= tol {
                hits += 1;
                let replace = best.as_ref().map_or(true, |(r, _)| residual < *r);
                if replace {
                    let mut signal = vec![0.0; n];
                    for (c, &j) in supp.iter().enumerate() {
                        signal[j] = coeffs[c];
                    }
                    best = Some((residual, signal));
                }
            }
        });
        if let Some((_, signal)) = best {
            return Ok(Some(SparsestSolution {
                signal,
                sparsity: size,
                unique: hits == 1,
            }));
        }
    }
    Ok(None)
}

/// Visit every `k`-combination of `0..n` in lexicographic order.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        visit(&c);
        // Rightmost index that can still advance.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if c[i] < n - k + i {
                break;
            }
        }
        c[i] += 1;
        for j in (i + 1)..k {
            c[j] = c[j - 1] + 1;
        }
    }
}
