use std::borrow::Cow;
use std::time::Instant;

use super::config::{SolverConfig, Variant};
use super::state::SolverState;
use super::subproblem::{solve_u_bins, solve_w_subproblem};
use super::trace::{ConvergenceTrace, IterationRecord};
use crate::error::{DcfError, Result};
use crate::objective::{evaluate_objective, ProblemInstance};
use crate::spectral::{fft2_channels, ifft2_channels, FeatureTensor};

/// Iteration cap used when counting iterations to a tolerance.
pub const ITERATION_CAP: usize = 500;

/// Stepwise driver over one [`SolverState`].
///
/// The penalty `cfg.rho` takes precedence over the problem's recorded `rho`.
pub struct Solver<'a> {
    prob: Cow<'a, ProblemInstance>,
    cfg: SolverConfig,
    alpha: f64,
    state: SolverState,
    prev_objective: f64,
    trace: ConvergenceTrace,
    start: Instant,
}

/// Final filter, trace, and the state to warm-start from.
#[derive(Debug, Clone)]
pub struct SolverOutcome {
    pub w: FeatureTensor,
    pub trace: ConvergenceTrace,
    pub state: SolverState,
}

impl<'a> Solver<'a> {
    pub fn new(prob: &'a ProblemInstance, cfg: &SolverConfig, init: Option<SolverState>) -> Result<Self> {
        cfg.validate()?;
        let prob = if cfg.rho == prob.rho() {
            Cow::Borrowed(prob)
        } else {
            Cow::Owned(prob.with_rho(cfg.rho)?)
        };
        let state = match init {
            Some(s) => {
                s.check_against(&prob)?;
                s
            }
            None => SolverState::zeros(prob.n(), prob.channels()),
        };
        let initial = evaluate_objective(&state.w, &prob)?;
        Ok(Self {
            alpha: cfg.effective_alpha(),
            cfg: cfg.clone(),
            prev_objective: initial,
            trace: ConvergenceTrace {
                initial_objective: initial,
                records: Vec::new(),
                converged: false,
            },
            state,
            prob,
            start: Instant::now(),
        })
    }

    pub fn state(&self) -> &SolverState {
        &self.state
    }

    pub fn trace(&self) -> &ConvergenceTrace {
        &self.trace
    }

    pub fn problem(&self) -> &ProblemInstance {
        &self.prob
    }

    /// One full iteration of the configured variant.
    pub fn step(&mut self) -> Result<IterationRecord> {
        let prob: &ProblemInstance = &self.prob;
        let rho = self.cfg.rho;
        let s = &self.state;

        // 1. Û from the (extrapolated) filter and multiplier.
        let fw_prime = fft2_channels(&s.w_prime)?;
        let ahat = fw_prime.lin_comb(1.0, &fft2_channels(&s.t_prime)?, -1.0);
        let uhat = solve_u_bins(prob, &ahat, rho);

        // 2. Relaxation.
        let vhat = if self.alpha == 1.0 {
            uhat.clone()
        } else {
            uhat.lin_comb(self.alpha, &fw_prime, 1.0 - self.alpha)
        };
        let v = ifft2_channels(&vhat)?;

        // 3. W, 4. multiplier.
        let w_new = solve_w_subproblem(&v, &s.t_prime, prob.mask(), rho, self.cfg.w_step)?;
        let t_new = s.t_prime.lin_comb(1.0, &v, 1.0).lin_comb(1.0, &w_new, -1.0);

        // 5–7. Momentum extrapolation.
        let (w_prime, t_prime, momentum) = if self.cfg.variant == Variant::RAAdmm {
            let l = s.iter as f64;
            let mu = l / (l + self.cfg.r);
            (
                w_new.lin_comb(1.0 + mu, &s.w, -mu),
                t_new.lin_comb(1.0 + mu, &s.t, -mu),
                mu,
            )
        } else {
            (w_new.clone(), t_new.clone(), 0.0)
        };

        let objective = evaluate_objective(&w_new, prob)?;
        let record = IterationRecord {
            iter: s.iter + 1,
            objective,
            primal_residual: v.distance(&w_new),
            dual_residual: rho * w_new.distance(&s.w),
            elapsed_ms: self.start.elapsed().as_secs_f64() * 1e3,
        };

        self.state = SolverState {
            uhat,
            w: w_new,
            t: t_new,
            w_prime,
            t_prime,
            iter: s.iter + 1,
            momentum,
        };
        self.trace.records.push(record);
        if !objective.is_finite() {
            return Err(DcfError::Diverged {
                iteration: record.iter,
                objective,
                trace: Box::new(self.trace.clone()),
            });
        }
        Ok(record)
    }

    /// Whether the mean-objective-change criterion holds for the last step.
    fn criterion_met(&self, objective: f64) -> bool {
        let scale = self.prob.size() as f64;
        (objective - self.prev_objective).abs() / scale < self.cfg.tol
    }

    /// Iterates until `|Λ(W[l]) − Λ(W[l−1])|/(N·N·C) < tol` or `max_iters`.
    pub fn run(mut self) -> Result<SolverOutcome> {
        while self.trace.len() < self.cfg.max_iters {
            let record = self.step()?;
            if self.criterion_met(record.objective) {
                self.trace.converged = true;
                break;
            }
            self.prev_objective = record.objective;
        }
        Ok(SolverOutcome {
            w: self.state.w.clone(),
            trace: self.trace,
            state: self.state,
        })
    }
}

/// Runs the configured solver from `init` (or the all-zero state).
pub fn run_solver(
    prob: &ProblemInstance,
    cfg: &SolverConfig,
    init: Option<&SolverState>,
) -> Result<(FeatureTensor, ConvergenceTrace)> {
    let out = run_solver_with_state(prob, cfg, init)?;
    Ok((out.w, out.trace))
}

pub fn run_solver_with_state(
    prob: &ProblemInstance,
    cfg: &SolverConfig,
    init: Option<&SolverState>,
) -> Result<SolverOutcome> {
    Solver::new(prob, cfg, init.cloned())?.run()
}

/// Smallest `l` at which the stopping criterion with `target_tol` holds, with
/// the iteration cap lifted to [`ITERATION_CAP`]. Returns the cap when the
/// criterion never fires.
pub fn iterations_to_tol(prob: &ProblemInstance, cfg: &SolverConfig, target_tol: f64) -> Result<usize> {
    iterations_to_tol_from(prob, cfg, target_tol, None).map(|(count, _)| count)
}

/// [`iterations_to_tol`] from a given start; also returns the final state.
pub fn iterations_to_tol_from(
    prob: &ProblemInstance,
    cfg: &SolverConfig,
    target_tol: f64,
    init: Option<&SolverState>,
) -> Result<(usize, SolverState)> {
    if !(target_tol > 0.0) {
        return Err(DcfError::InvalidParameter(format!(
            "target tolerance must be positive, got {target_tol}"
        )));
    }
    let cfg = SolverConfig {
        tol: target_tol,
        max_iters: ITERATION_CAP,
        ..cfg.clone()
    };
    let out = run_solver_with_state(prob, &cfg, init)?;
    Ok((out.trace.len(), out.state))
}
