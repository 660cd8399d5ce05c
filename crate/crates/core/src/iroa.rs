//! The iteratively reweighed operator solver.
//!
//! Each iteration scales the columns of the measurement matrix by a diagonal
//! built from the current iterate (`lambda_i = u_i^p`), solves the ridge
//! subproblem on the still-active columns, and prunes components that have
//! fallen far below the largest one. Pruned columns never come back, so the
//! working subspace only shrinks. The signal estimate for an iteration is
//! the product of the previous diagonal with the new iterate; at a fixed
//! point it collapses to `u^(p+1)` componentwise, which is why odd exponents
//! produce non-negative reconstructions.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::model::{Problem, SolveResult};
use crate::ridge::{ridge_solve, RidgeInput};

/// Solver parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct IroaConfig {
    /// Reweight exponent (`lambda_i = u_i^p`), at least 1.
    pub p: u32,
    /// Ridge regularization weight of the inner subproblem.
    pub mu: f64,
    /// Stopping parameter; iteration stops when the relative change of the
    /// iterate drops below `epsilon / 100`.
    pub epsilon: f64,
    /// Iteration cap; hitting it is reported as not converged.
    pub max_iters: usize,
    /// Relative pruning threshold: components below `prune_tau * max |u_j|`
    /// are dropped. Zero disables pruning.
    pub prune_tau: f64,
    /// Optional nondecreasing exponent schedule for the stage-wise solver.
    pub p_schedule: Option<Vec<u32>>,
    /// Record the per-iteration signal estimates.
    pub record_trace: bool,
}

impl Default for IroaConfig {
    fn default() -> Self {
        Self {
            p: 2,
            mu: 1e-6,
            epsilon: 1e-3,
            max_iters: 100,
            prune_tau: 1e-4,
            p_schedule: None,
            record_trace: false,
        }
    }
}

impl IroaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.p < 1 {
            return Err(Error::Input("reweight exponent must be at least 1".into()));
        }
        if !(self.mu > 0.0) || !self.mu.is_finite() {
            return Err(Error::Input(format!("mu must be positive, got {}", self.mu)));
        }
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Input(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Input("max_iters must be positive".into()));
        }
        if !(self.prune_tau >= 0.0) || !self.prune_tau.is_finite() {
            return Err(Error::Input(format!(
                "prune threshold must be nonnegative, got {}",
                self.prune_tau
            )));
        }
        if let Some(schedule) = &self.p_schedule {
            if schedule.is_empty() {
                return Err(Error::Input("exponent schedule is empty".into()));
            }
            if schedule[0] < 1 || schedule.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::Input(
                    "exponent schedule must be nondecreasing and at least 1".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Evolving solver state: iterate, reweight diagonal, active columns.
#[derive(Debug, Clone, PartialEq)]
pub struct IroaState {
    u: Vec<f64>,
    lambda: Vec<f64>,
    active: Vec<usize>,
    iter: usize,
}

impl IroaState {
    /// All-ones start: `u = 1`, `lambda = 1`, every column active.
    pub fn initial(n: usize, p: u32) -> Self {
        let u = vec![1.0; n];
        let lambda = reweight(&u, p);
        Self {
            u,
            lambda,
            active: (0..n).collect(),
            iter: 0,
        }
    }

    fn from_start(u: Vec<f64>, p: u32, active: Vec<usize>) -> Self {
        let lambda = reweight(&u, p);
        Self {
            u,
            lambda,
            active,
            iter: 0,
        }
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Sorted indices of the columns that have not been pruned.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn iter(&self) -> usize {
        self.iter
    }
}

/// Signed componentwise power: `lambda_i = u_i^p`. Odd exponents keep the
/// sign, even ones do not.
pub fn reweight(u: &[f64], p: u32) -> Vec<f64> {
    u.iter().map(|&v| linalg::powi(v, p)).collect()
}

/// Signal estimate for one iteration: the previous diagonal applied to the
/// new iterate, `x_i = lambda_i * u_i`.
pub fn estimate_signal(state_prev_lambda: &[f64], u_next: &[f64]) -> Result<Vec<f64>> {
    if state_prev_lambda.len() != u_next.len() {
        return Err(Error::Dimension(format!(
            "estimate_signal on lengths {} and {}",
            state_prev_lambda.len(),
            u_next.len()
        )));
    }
    Ok(state_prev_lambda
        .iter()
        .zip(u_next)
        .map(|(l, u)| l * u)
        .collect())
}

/// Drop every active index with `|u_i| < tau * max_j |u_j|`; dropped indices
/// are zeroed for good. `tau = 0` disables pruning entirely. If the whole
/// active iterate is zero the active set is emptied (converged-to-zero).
pub fn prune(state: &IroaState, tau: f64) -> IroaState {
    if tau == 0.0 {
        return state.clone();
    }
    let max_mag = state
        .active
        .iter()
        .fold(0.0f64, |acc, &i| acc.max(state.u[i].abs()));
    let mut out = state.clone();
    if max_mag == 0.0 {
        out.active.clear();
        return out;
    }
    let cut = tau * max_mag;
    out.active.retain(|&i| {
        if state.u[i].abs() < cut {
            out.u[i] = 0.0;
            out.lambda[i] = 0.0;
            false
        } else {
            true
        }
    });
    out
}

/// Stopping rule: relative change of the iterate below `epsilon / 100`.
/// An all-zero previous iterate counts as converged only onto zero.
pub fn has_converged(u_prev: &[f64], u_next: &[f64], epsilon: f64) -> Result<bool> {
    if u_prev.len() != u_next.len() {
        return Err(Error::Dimension(format!(
            "has_converged on lengths {} and {}",
            u_prev.len(),
            u_next.len()
        )));
    }
    let prev_norm = linalg::norm2(u_prev);
    if prev_norm == 0.0 {
        return Ok(linalg::norm2(u_next) == 0.0);
    }
    Ok(linalg::dist2(u_next, u_prev) / prev_norm < epsilon / 100.0)
}

/// One iteration: ridge-solve on the reweighed active columns, scatter the
/// restricted minimizer back to full length, rebuild the diagonal, prune.
///
/// Returns [`Error::DegenerateState`] when the active set is or becomes
/// empty; callers treat that as converged-to-zero.
pub fn iroa_step(problem: &Problem, state: &IroaState, config: &IroaConfig) -> Result<IroaState> {
    if state.active.is_empty() {
        return Err(Error::DegenerateState);
    }
    let m = problem.m();
    let mut a = Matrix::zeros(m, state.active.len());
    for (k, &j) in state.active.iter().enumerate() {
        let scale = state.lambda[j];
        let dst = a.col_mut(k);
        for (d, s) in dst.iter_mut().zip(problem.phi().col(j)) {
            *d = s * scale;
        }
    }
    let v = ridge_solve(RidgeInput::new(&a, problem.b(), config.mu))?;

    let mut u_next = vec![0.0; problem.n()];
    for (k, &j) in state.active.iter().enumerate() {
        u_next[j] = v[k];
    }
    let next = IroaState {
        lambda: reweight(&u_next, config.p),
        u: u_next,
        active: state.active.clone(),
        iter: state.iter + 1,
    };
    let next = prune(&next, config.prune_tau);
    if next.active.is_empty() {
        return Err(Error::DegenerateState);
    }
    Ok(next)
}

/// Full solve from the all-ones start. See [`run_stage`] for the loop.
pub fn iroa_solve(problem: &Problem, config: &IroaConfig) -> Result<SolveResult> {
    config.validate()?;
    let state = IroaState::initial(problem.n(), config.p);
    let mut trace = config.record_trace.then(Vec::new);
    let stage = run_stage(problem, config, state, &mut trace, true)?;
    Ok(finish(problem, stage, trace))
}

/// Reference variant that never invokes pruning, regardless of `prune_tau`.
/// Exists to validate that a `tau = 0` run and a run with no prune call at
/// all are identical.
pub fn iroa_solve_unpruned(problem: &Problem, config: &IroaConfig) -> Result<SolveResult> {
    config.validate()?;
    let state = IroaState::initial(problem.n(), config.p);
    let mut trace = config.record_trace.then(Vec::new);
    let stage = run_stage(problem, config, state, &mut trace, false)?;
    Ok(finish(problem, stage, trace))
}

/// Stage-wise solve over `config.p_schedule`.
///
/// Stage `j + 1` warm-starts from the signed `(p + 1)`-th root of the
/// previous stage's signal estimate (inverting the fixed-point map
/// `x = u^(p+1)` of the incoming exponent), restricted to the columns that
/// survived. Iteration counts are summed; traces are concatenated.
pub fn iroa_solve_schedule(problem: &Problem, config: &IroaConfig) -> Result<SolveResult> {
    config.validate()?;
    let schedule = config
        .p_schedule
        .as_ref()
        .ok_or_else(|| Error::Input("schedule solver called without a p_schedule".into()))?
        .clone();

    let mut trace = config.record_trace.then(Vec::new);
    let mut total_iters = 0;
    let mut outcome: Option<StageOutcome> = None;

    for (idx, &p) in schedule.iter().enumerate() {
        let stage_config = IroaConfig {
            p,
            p_schedule: None,
            ..config.clone()
        };
        let state = match &outcome {
            None => IroaState::initial(problem.n(), p),
            Some(prev) => {
                if prev.state.active.is_empty() {
                    break;
                }
                let mut u0 = vec![0.0; problem.n()];
                let root = 1.0 / f64::from(p + 1);
                for &j in &prev.state.active {
                    let x = prev.x_hat[j];
                    u0[j] = x.signum() * libm::pow(x.abs(), root);
                }
                IroaState::from_start(u0, p, prev.state.active.clone())
            }
        };
        let _ = idx;
        let stage = run_stage(problem, &stage_config, state, &mut trace, true)?;
        total_iters += stage.state.iter;
        outcome = Some(stage);
    }

    let mut stage = outcome.expect("schedule validated nonempty");
    stage.state.iter = total_iters;
    Ok(finish(problem, stage, trace))
}

struct StageOutcome {
    state: IroaState,
    x_hat: Vec<f64>,
    converged: bool,
}

/// The solve loop shared by the one-shot and stage-wise entry points.
fn run_stage(
    problem: &Problem,
    config: &IroaConfig,
    mut state: IroaState,
    trace: &mut Option<Vec<Vec<f64>>>,
    prune_enabled: bool,
) -> Result<StageOutcome> {
    let step_config = if prune_enabled {
        config.clone()
    } else {
        IroaConfig {
            prune_tau: 0.0,
            ..config.clone()
        }
    };
    let n = problem.n();
    let mut x_hat = vec![0.0; n];
    let converged = loop {
        let u_prev = state.u.clone();
        let lambda_prev = state.lambda.clone();
        match iroa_step(problem, &state, &step_config) {
            Ok(next) => {
                let x_est = estimate_signal(&lambda_prev, &next.u)?;
                if let Some(t) = trace.as_mut() {
                    t.push(x_est.clone());
                }
                x_hat = x_est;
                let done = has_converged(&u_prev, &next.u, config.epsilon)?;
                state = next;
                if done {
                    break true;
                }
                if state.iter >= config.max_iters {
                    break false;
                }
            }
            Err(Error::DegenerateState) => {
                // Everything was pruned away: the estimate is exactly zero.
                let x_est = vec![0.0; n];
                if let Some(t) = trace.as_mut() {
                    t.push(x_est.clone());
                }
                x_hat = x_est;
                state = IroaState {
                    u: vec![0.0; n],
                    lambda: vec![0.0; n],
                    active: Vec::new(),
                    iter: state.iter + 1,
                };
                break true;
            }
            Err(e) => return Err(e),
        }
    };
    Ok(StageOutcome {
        state,
        x_hat,
        converged,
    })
}

fn finish(problem: &Problem, stage: StageOutcome, trace: Option<Vec<Vec<f64>>>) -> SolveResult {
    let residual_norm = linalg::dist2(&problem.phi().matvec(&stage.x_hat), problem.b());
    SolveResult {
        x_hat: stage.x_hat,
        u_final: stage.state.u,
        iterations: stage.state.iter,
        converged: stage.converged,
        residual_norm,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn identity_problem(b: Vec<f64>) -> Problem {
        let n = b.len();
        Problem::new(Matrix::identity(n), b).unwrap()
    }

    #[test]
    fn reweight_all_ones() {
        assert_eq!(reweight(&[1.0, 1.0, 1.0], 2), vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn reweight_even_power() {
        assert_eq!(reweight(&[2.0, -1.0, 0.0], 2), vec![4.0, 1.0, 0.0]);
    }

    #[test]
    fn reweight_odd_power_keeps_sign() {
        assert_eq!(reweight(&[2.0, -1.0, 0.0], 3), vec![8.0, -1.0, 0.0]);
    }

    #[test]
    fn estimate_signal_first_iteration() {
        assert_eq!(
            estimate_signal(&[1.0, 1.0, 1.0], &[3.0, 0.0, -2.0]).unwrap(),
            vec![3.0, 0.0, -2.0]
        );
    }

    #[test]
    fn estimate_signal_componentwise() {
        assert_eq!(
            estimate_signal(&[4.0, 1.0, 0.0], &[0.5, -1.0, 7.0]).unwrap(),
            vec![2.0, -1.0, 0.0]
        );
    }

    #[test]
    fn estimate_signal_fixed_point_power() {
        // At a fixed point with p = 2 the estimate is u^3 componentwise.
        let u = [1.0, -2.0];
        let lambda = reweight(&u, 2);
        assert_eq!(estimate_signal(&lambda, &u).unwrap(), vec![1.0, -8.0]);
    }

    #[test]
    fn estimate_signal_length_mismatch() {
        assert!(estimate_signal(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn prune_drops_small_component() {
        let mut state = IroaState::initial(3, 2);
        state.u = vec![1.0, 1e-9, 0.5];
        state.lambda = reweight(&state.u, 2);
        let pruned = prune(&state, 1e-4);
        assert_eq!(pruned.active(), &[0, 2]);
        assert_eq!(pruned.u(), &[1.0, 0.0, 0.5]);
        assert_eq!(pruned.lambda()[1], 0.0);
    }

    #[test]
    fn prune_zero_tau_is_identity() {
        let mut state = IroaState::initial(3, 2);
        state.u = vec![1.0, 1e-12, 0.0];
        state.lambda = reweight(&state.u, 2);
        let pruned = prune(&state, 0.0);
        assert_eq!(pruned, state);
    }

    #[test]
    fn prune_all_zero_empties_active_set() {
        let mut state = IroaState::initial(3, 2);
        state.u = vec![0.0; 3];
        state.lambda = vec![0.0; 3];
        let pruned = prune(&state, 1e-4);
        assert!(pruned.active().is_empty());
    }

    #[test]
    fn has_converged_examples() {
        assert!(has_converged(&[1.0, 1.0], &[1.0, 1.0], 1e-3).unwrap());
        assert!(!has_converged(&[1.0, 0.0], &[0.0, 1.0], 1e-3).unwrap());
        assert!(has_converged(&[0.0, 0.0], &[0.0, 0.0], 1e-3).unwrap());
        assert!(!has_converged(&[0.0, 0.0], &[0.0, 1.0], 1e-3).unwrap());
        assert!(has_converged(&[1.0], &[1.0, 2.0], 1e-3).is_err());
    }

    #[test]
    fn step_on_identity_decouples() {
        let problem = identity_problem(vec![1.0, 0.0, 0.0]);
        let config = IroaConfig {
            prune_tau: 0.0,
            ..IroaConfig::default()
        };
        let state = IroaState::initial(3, config.p);
        let next = iroa_step(&problem, &state, &config).unwrap();
        // (lambda_j^2 + mu) u_j = lambda_j b_j with lambda = 1.
        assert!((next.u()[0] - 1.0 / (1.0 + config.mu)).abs() < 1e-9);
        assert!(next.u()[1].abs() < 1e-12);
        assert!(next.u()[2].abs() < 1e-12);
        assert_eq!(next.iter(), 1);
        // State consistency: lambda tracks u^p on the active set.
        for &i in next.active() {
            assert_eq!(next.lambda()[i], linalg::powi(next.u()[i], config.p));
        }
    }

    #[test]
    fn step_zero_data_zeroes_iterate() {
        let problem = Problem::new(
            Matrix::from_fn(2, 4, |r, c| (r + c) as f64 + 1.0),
            vec![0.0, 0.0],
        )
        .unwrap();
        let config = IroaConfig {
            prune_tau: 0.0,
            ..IroaConfig::default()
        };
        let state = IroaState::initial(4, config.p);
        let next = iroa_step(&problem, &state, &config).unwrap();
        assert!(next.u().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn step_propagates_degenerate_state() {
        let problem = identity_problem(vec![0.0, 0.0]);
        let config = IroaConfig::default();
        let state = IroaState::initial(2, config.p);
        // Zero data zeroes u, default pruning then empties the active set.
        assert!(matches!(
            iroa_step(&problem, &state, &config),
            Err(Error::DegenerateState)
        ));
    }

    #[test]
    fn solve_zero_data() {
        let problem = Problem::new(Matrix::from_fn(5, 10, |r, c| ((r * 10 + c) % 7) as f64 - 3.0), vec![0.0; 5])
            .unwrap();
        let result = iroa_solve(&problem, &IroaConfig::default()).unwrap();
        assert!(result.converged);
        assert!(result.iterations <= 2);
        assert!(result.x_hat.iter().all(|&v| v == 0.0));
        assert_eq!(result.residual_norm, 0.0);
    }

    #[test]
    fn solve_identity_spike() {
        let problem = identity_problem(vec![0.0, 3.0, 0.0, 0.0]);
        let config = IroaConfig {
            record_trace: true,
            ..IroaConfig::default()
        };
        let result = iroa_solve(&problem, &config).unwrap();
        assert!(result.converged);
        let err = crate::model::relative_error(&result.x_hat, &[0.0, 3.0, 0.0, 0.0]).unwrap();
        assert!(err <= 1e-6, "relative error {err}");
        // Fixed point of the scalar iteration: u = 3^(1/3).
        let cube_root_3 = libm::cbrt(3.0);
        assert!((result.u_final[1] - cube_root_3).abs() < 1e-3);
        assert_eq!(result.trace.as_ref().unwrap().len(), result.iterations);
    }

    #[test]
    fn solve_schedule_single_stage_matches_plain() {
        let problem = identity_problem(vec![0.0, 2.0, 1.0, 0.0]);
        for p in [1u32, 2] {
            let plain = iroa_solve(
                &problem,
                &IroaConfig {
                    p,
                    ..IroaConfig::default()
                },
            )
            .unwrap();
            let scheduled = iroa_solve_schedule(
                &problem,
                &IroaConfig {
                    p_schedule: Some(vec![p]),
                    ..IroaConfig::default()
                },
            )
            .unwrap();
            assert_eq!(plain.x_hat, scheduled.x_hat);
            assert_eq!(plain.iterations, scheduled.iterations);
            assert_eq!(plain.converged, scheduled.converged);
        }
    }

    #[test]
    fn solve_schedule_requires_schedule() {
        let problem = identity_problem(vec![1.0, 0.0]);
        assert!(iroa_solve_schedule(&problem, &IroaConfig::default()).is_err());
    }

    #[test]
    fn config_rejects_decreasing_schedule() {
        let config = IroaConfig {
            p_schedule: Some(vec![2, 1]),
            ..IroaConfig::default()
        };
        assert!(config.validate().is_err());
    }

    #[test]
    fn active_set_shrinks_monotonically() {
        let problem = Problem::new(
            Matrix::from_fn(4, 8, |r, c| libm::sin((1 + r * 8 + c) as f64)),
            vec![1.0, -0.5, 0.25, 0.125],
        )
        .unwrap();
        let config = IroaConfig::default();
        let mut state = IroaState::initial(8, config.p);
        for _ in 0..10 {
            let next = match iroa_step(&problem, &state, &config) {
                Ok(s) => s,
                Err(Error::DegenerateState) => break,
                Err(e) => panic!("{e}"),
            };
            assert!(
                next.active().iter().all(|i| state.active().contains(i)),
                "active set grew"
            );
            state = next;
        }
    }
}
