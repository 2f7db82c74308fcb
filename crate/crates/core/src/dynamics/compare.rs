use serde::{Deserialize, Serialize};

use super::ode::{advance, GradientScale, OdeKind, OdeState, OdeSystem};
use crate::error::{DcfError, Result};
use crate::objective::ProblemInstance;
use crate::solver::{Solver, SolverConfig, SolverState, Variant};
use crate::spectral::FeatureTensor;

/// Iterate-versus-trajectory comparison at one penalty value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub rho: f64,
    pub variant: Variant,
    /// Continuous time covered by one iteration.
    pub time_step: f64,
    pub horizon: f64,
    /// Number of compared iterates.
    pub samples: usize,
    /// `sup_l ‖W[l] − W(t_l)‖_F`.
    pub max_deviation: f64,
}

/// Time advanced per iteration: `1/√ρ` for the accelerated solver, `1/ρ`
/// for plain and relaxed ADMM.
pub fn iteration_time_step(variant: Variant, rho: f64) -> f64 {
    if variant.is_accelerated() {
        1.0 / rho.sqrt()
    } else {
        1.0 / rho
    }
}

/// Runs the solver from zero and integrates the matching continuous system
/// alongside it, reporting the largest deviation over `t ∈ (0, horizon]`.
pub fn compare_iterates_to_ode(prob: &ProblemInstance, cfg: &SolverConfig, horizon_t: f64) -> Result<ComparisonReport> {
    compare_iterates_to_ode_from(prob, cfg, horizon_t, None)
}

/// As [`compare_iterates_to_ode`], starting both systems at `w0`.
///
/// The solver starts from the state whose multiplier is consistent with
/// `w0` (see [`SolverState::stationary`]); for `w0 = 0` this is the usual
/// all-zero start.
pub fn compare_iterates_to_ode_from(
    prob: &ProblemInstance,
    cfg: &SolverConfig,
    horizon_t: f64,
    w0: Option<&FeatureTensor>,
) -> Result<ComparisonReport> {
    compare_with_scale(prob, cfg, horizon_t, w0, GradientScale::default())
}

/// As [`compare_iterates_to_ode_from`] with an explicit gradient coefficient.
pub fn compare_with_scale(
    prob: &ProblemInstance,
    cfg: &SolverConfig,
    horizon_t: f64,
    w0: Option<&FeatureTensor>,
    scale: GradientScale,
) -> Result<ComparisonReport> {
    let kind = if cfg.variant.is_accelerated() {
        OdeKind::Accelerated { r: cfg.r }
    } else {
        OdeKind::FirstOrder
    };
    let zero = FeatureTensor::zeros(prob.n(), prob.channels());
    let sys =
        OdeSystem::for_problem(prob, kind, cfg.effective_alpha(), w0.unwrap_or(&zero))?.with_gradient_scale(scale);
    compare_iterates_to_system(prob, cfg, &sys, horizon_t)
}

/// Compares solver iterates against an explicitly constructed system. The
/// system must be the continuous limit of `cfg.variant`: accelerated for
/// R_A-ADMM, first-order otherwise, with the same `α` (and `r`).
pub fn compare_iterates_to_system(
    prob: &ProblemInstance,
    cfg: &SolverConfig,
    sys: &OdeSystem,
    horizon_t: f64,
) -> Result<ComparisonReport> {
    if !(horizon_t > 0.0) {
        return Err(DcfError::InvalidParameter(format!(
            "horizon must be positive, got {horizon_t}"
        )));
    }
    let alpha = cfg.effective_alpha();
    let kind = sys.kind();
    let matches = match kind {
        OdeKind::Accelerated { r } => cfg.variant.is_accelerated() && r == cfg.r,
        OdeKind::FirstOrder => !cfg.variant.is_accelerated(),
    };
    if !matches || sys.alpha() != alpha {
        return Err(DcfError::InvalidParameter(format!(
            "{} iterates do not correspond to {kind:?} with alpha {}",
            cfg.variant,
            sys.alpha()
        )));
    }
    if sys.dim() != prob.size() {
        return Err(DcfError::Shape("system dimension differs from the problem".into()));
    }
    let w0 = FeatureTensor::new(prob.n(), prob.channels(), sys.initial_state().w)?;

    let eps = iteration_time_step(cfg.variant, cfg.rho);
    let iterations = (horizon_t / eps).ceil() as usize;
    let solver_cfg = SolverConfig {
        max_iters: iterations.max(1),
        tol: 0.0,
        ..cfg.clone()
    };
    let init = SolverState::stationary(prob, &w0, cfg.rho)?;
    let mut solver = Solver::new(prob, &solver_cfg, Some(init))?;

    // Sub-step bound from the gradient's Lipschitz constant and, for the
    // accelerated system, the r/t damping.
    let stiffness = prob.gradient_lipschitz_bound() * sys.gradient_coefficient();
    let base_step = match kind {
        OdeKind::FirstOrder => (0.5 / stiffness).min(1e-3),
        OdeKind::Accelerated { .. } => (0.25 / stiffness.sqrt()).min(1e-3),
    };

    // The accelerated system starts one step in, at t = ε.
    let mut t = match kind {
        OdeKind::Accelerated { .. } => eps,
        OdeKind::FirstOrder => 0.0,
    };
    let mut ode_state: OdeState = sys.initial_state();
    let mut max_dev = 0.0_f64;
    for l in 1..=iterations {
        solver.step()?;
        let t_next = l as f64 * eps;
        if t_next > t {
            let max_step = match kind {
                OdeKind::Accelerated { r } => base_step.min(0.1 * t / r),
                OdeKind::FirstOrder => base_step,
            };
            ode_state = advance(sys, t, ode_state, t_next, max_step)?;
            t = t_next;
        }
        let dev = crate::numeric::distance(solver.state().w.as_slice(), &ode_state.w);
        max_dev = max_dev.max(dev);
    }

    Ok(ComparisonReport {
        rho: cfg.rho,
        variant: cfg.variant,
        time_step: eps,
        horizon: horizon_t,
        samples: iterations,
        max_deviation: max_dev,
    })
}
