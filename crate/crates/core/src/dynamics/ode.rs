use crate::error::{DcfError, Result};
use crate::objective::{objective_gradient, ProblemInstance};
use crate::spectral::FeatureTensor;

/// Gradient callback over flattened filter coefficients.
pub type GradientFn = Box<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeKind {
    /// `(2−α)(Ẅ + (r/t)Ẇ) + ∇Λ(W) = 0`.
    Accelerated { r: f64 },
    /// `(2−α)Ẇ + ∇Λ(W) = 0`.
    FirstOrder,
}

/// Coefficient multiplying `−∇Λ` in the continuous system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GradientScale {
    /// `1/(2−α)`, the published form of both systems.
    #[default]
    InverseTwoMinusAlpha,
    /// `α`. Eliminating the multiplier from the iteration exactly gives
    /// this coefficient; it agrees with `1/(2−α)` to first order in `α−1`
    /// and is identical at `α = 1`.
    Alpha,
}

pub struct OdeSystem {
    kind: OdeKind,
    alpha: f64,
    scale: GradientScale,
    grad: GradientFn,
    w0: Vec<f64>,
    v0: Vec<f64>,
}

/// Position and (for the accelerated system) velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeState {
    pub w: Vec<f64>,
    /// Empty for first-order systems.
    pub v: Vec<f64>,
}

impl OdeState {
    fn is_finite(&self) -> bool {
        self.w.iter().chain(&self.v).all(|x| x.is_finite())
    }

    fn axpy(&self, h: f64, d: &OdeState) -> OdeState {
        OdeState {
            w: self.w.iter().zip(&d.w).map(|(a, b)| a + h * b).collect(),
            v: self.v.iter().zip(&d.v).map(|(a, b)| a + h * b).collect(),
        }
    }
}

/// Sampled solution: `states[i]` at `times[i]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<OdeState>,
}

impl OdeSystem {
    pub fn new(kind: OdeKind, alpha: f64, grad: GradientFn, w0: Vec<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) {
            return Err(DcfError::InvalidParameter(format!(
                "alpha must lie in (0,2), got {alpha}"
            )));
        }
        let v0 = match kind {
            OdeKind::Accelerated { r } => {
                if !(r >= 3.0) {
                    return Err(DcfError::InvalidParameter(format!("damping r must be >= 3, got {r}")));
                }
                vec![0.0; w0.len()]
            }
            OdeKind::FirstOrder => Vec::new(),
        };
        Ok(Self {
            kind,
            alpha,
            scale: GradientScale::default(),
            grad,
            w0,
            v0,
        })
    }

    /// Sets the initial velocity (accelerated systems only).
    pub fn with_velocity(mut self, v0: Vec<f64>) -> Result<Self> {
        match self.kind {
            OdeKind::Accelerated { .. } if v0.len() == self.w0.len() => {
                self.v0 = v0;
                Ok(self)
            }
            OdeKind::Accelerated { .. } => Err(DcfError::Shape("velocity length differs from position".into())),
            OdeKind::FirstOrder => Err(DcfError::InvalidParameter(
                "first-order systems carry no velocity".into(),
            )),
        }
    }

    pub fn with_gradient_scale(mut self, scale: GradientScale) -> Self {
        self.scale = scale;
        self
    }

    pub fn gradient_scale(&self) -> GradientScale {
        self.scale
    }

    /// The factor `c` in `Ẇ = −c·∇Λ` (first order) or
    /// `Ẅ + (r/t)Ẇ = −c·∇Λ` (accelerated).
    pub fn gradient_coefficient(&self) -> f64 {
        match self.scale {
            GradientScale::InverseTwoMinusAlpha => 1.0 / (2.0 - self.alpha),
            GradientScale::Alpha => self.alpha,
        }
    }

    /// The system driven by `∇Λ` of a filter problem.
    pub fn for_problem(prob: &ProblemInstance, kind: OdeKind, alpha: f64, w0: &FeatureTensor) -> Result<Self> {
        let prob = prob.clone();
        let (n, c) = (prob.n(), prob.channels());
        let grad: GradientFn = Box::new(move |w: &[f64]| {
            FeatureTensor::new(n, c, w.to_vec())
                .and_then(|t| objective_gradient(&t, &prob))
                .map(FeatureTensor::into_vec)
                .unwrap_or_else(|_| vec![f64::NAN; w.len()])
        });
        Self::new(kind, alpha, grad, w0.as_slice().to_vec())
    }

    pub fn kind(&self) -> OdeKind {
        self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.w0.len()
    }

    pub fn initial_state(&self) -> OdeState {
        OdeState {
            w: self.w0.clone(),
            v: self.v0.clone(),
        }
    }

    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        (self.grad)(w)
    }
}

/// Time derivative of the state.
pub fn ode_rhs(sys: &OdeSystem, t: f64, state: &OdeState) -> Result<OdeState> {
    let g = sys.gradient(&state.w);
    let inv = sys.gradient_coefficient();
    match sys.kind {
        OdeKind::FirstOrder => Ok(OdeState {
            w: g.iter().map(|gi| -gi * inv).collect(),
            v: Vec::new(),
        }),
        OdeKind::Accelerated { r } => {
            if !(t > 0.0) {
                return Err(DcfError::InvalidParameter(format!(
                    "accelerated system is singular at t = {t}"
                )));
            }
            let damping = r / t;
            Ok(OdeState {
                w: state.v.clone(),
                v: state
                    .v
                    .iter()
                    .zip(&g)
                    .map(|(vi, gi)| -damping * vi - gi * inv)
                    .collect(),
            })
        }
    }
}

/// One classical fourth-order Runge–Kutta step.
pub fn rk4_step(sys: &OdeSystem, t: f64, state: &OdeState, h: f64) -> Result<OdeState> {
    let k1 = ode_rhs(sys, t, state)?;
    let k2 = ode_rhs(sys, t + 0.5 * h, &state.axpy(0.5 * h, &k1))?;
    let k3 = ode_rhs(sys, t + 0.5 * h, &state.axpy(0.5 * h, &k2))?;
    let k4 = ode_rhs(sys, t + h, &state.axpy(h, &k3))?;
    let mut out = state.clone();
    let sixth = h / 6.0;
    for (i, w) in out.w.iter_mut().enumerate() {
        *w += sixth * (k1.w[i] + 2.0 * k2.w[i] + 2.0 * k3.w[i] + k4.w[i]);
    }
    for (i, v) in out.v.iter_mut().enumerate() {
        *v += sixth * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
    }
    Ok(out)
}

/// Fixed-step RK4 from `t0` to `t1`, sampling every step. The final step is
/// shortened to land exactly on `t1`.
pub fn integrate(sys: &OdeSystem, t0: f64, t1: f64, step: f64) -> Result<Trajectory> {
    if !(step > 0.0) || !(t1 > t0) {
        return Err(DcfError::InvalidParameter(format!(
            "need t0 < t1 and step > 0, got [{t0}, {t1}] step {step}"
        )));
    }
    if matches!(sys.kind, OdeKind::Accelerated { .. }) && !(t0 > 0.0) {
        return Err(DcfError::InvalidParameter(
            "accelerated integration must start at t0 > 0".into(),
        ));
    }
    integrate_from(sys, t0, sys.initial_state(), t1, step)
}

pub(crate) fn integrate_from(sys: &OdeSystem, t0: f64, start: OdeState, t1: f64, step: f64) -> Result<Trajectory> {
    let steps = ((t1 - t0) / step).ceil().max(1.0) as usize;
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
    };
    let mut t = t0;
    let mut state = start;
    traj.times.push(t);
    traj.states.push(state.clone());
    for i in 0..steps {
        let next_t = if i + 1 == steps { t1 } else { t0 + (i + 1) as f64 * step };
        state = rk4_step(sys, t, &state, next_t - t)?;
        t = next_t;
        if !state.is_finite() {
            return Err(DcfError::OdeBlowUp {
                time: t,
                partial: Box::new(traj),
            });
        }
        traj.times.push(t);
        traj.states.push(state.clone());
    }
    Ok(traj)
}

/// Advances `state` from `t0` to `t1` in equal sub-steps no longer than
/// `max_step`, without recording intermediate samples.
pub(crate) fn advance(sys: &OdeSystem, t0: f64, state: OdeState, t1: f64, max_step: f64) -> Result<OdeState> {
    let steps = ((t1 - t0) / max_step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    let mut state = state;
    for i in 0..steps {
        state = rk4_step(sys, t0 + i as f64 * h, &state, h)?;
    }
    if !state.is_finite() {
        return Err(DcfError::OdeBlowUp {
            time: t1,
            partial: Box::default(),
        });
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Λ(w) = a·w², ∇Λ = 2a·w.
    fn scalar_quadratic(a: f64) -> GradientFn {
        Box::new(move |w: &[f64]| w.iter().map(|x| 2.0 * a * x).collect())
    }

    #[test]
    fn equilibrium_has_zero_derivative() {
        for kind in [OdeKind::FirstOrder, OdeKind::Accelerated { r: 4.0 }] {
            let sys = OdeSystem::new(kind, 1.1, scalar_quadratic(1.0), vec![0.0]).unwrap();
            let d = ode_rhs(&sys, 1.0, &sys.initial_state()).unwrap();
            assert!(d.w.iter().chain(&d.v).all(|x| *x == 0.0));
        }
    }

    #[test]
    fn direct_substitution_values() {
        let first = OdeSystem::new(OdeKind::FirstOrder, 1.0, scalar_quadratic(1.0), vec![0.7]).unwrap();
        let d = ode_rhs(&first, 0.3, &first.initial_state()).unwrap();
        assert!((d.w[0] + 2.0 * 0.7).abs() < 1e-15);

        let acc = OdeSystem::new(OdeKind::Accelerated { r: 4.0 }, 1.10, scalar_quadratic(1.0), vec![1.0]).unwrap();
        let d = ode_rhs(&acc, 1.0, &acc.initial_state()).unwrap();
        assert_eq!(d.w[0], 0.0);
        assert!((d.v[0] + 2.0 / 0.9).abs() < 1e-12);
        assert!((d.v[0] + 2.2222).abs() < 1e-4);
        assert!(ode_rhs(&acc, 0.0, &acc.initial_state()).is_err());
    }

    #[test]
    fn first_order_matches_exponential() {
        let alpha = 1.1;
        let w0 = 1.5;
        let sys = OdeSystem::new(OdeKind::FirstOrder, alpha, scalar_quadratic(1.0), vec![w0]).unwrap();
        let traj = integrate(&sys, 0.0, 1.0, 1e-3).unwrap();
        let exact = w0 * (-2.0 / (2.0 - alpha)).exp();
        assert_eq!(*traj.times.last().unwrap(), 1.0);
        assert!((traj.states.last().unwrap().w[0] - exact).abs() < 1e-8);
    }

    #[test]
    fn zero_gradient_keeps_state() {
        let sys = OdeSystem::new(
            OdeKind::Accelerated { r: 3.0 },
            0.5,
            Box::new(|w: &[f64]| vec![0.0; w.len()]),
            vec![2.0, -1.0],
        )
        .unwrap();
        let traj = integrate(&sys, 0.5, 3.0, 0.1).unwrap();
        assert!(traj.states.iter().all(|s| s.w == vec![2.0, -1.0]));
    }

    #[test]
    fn rk4_order_is_four() {
        // Reference by a very fine step, then Richardson ratio of two coarse steps.
        let make = || OdeSystem::new(OdeKind::Accelerated { r: 4.0 }, 1.1, scalar_quadratic(1.0), vec![1.0]).unwrap();
        let end = |h: f64| integrate(&make(), 0.1, 5.0, h).unwrap().states.last().unwrap().w[0];
        let reference = end(1e-5);
        let e1 = (end(0.02) - reference).abs();
        let e2 = (end(0.01) - reference).abs();
        let order = (e1 / e2).log2();
        assert!(order >= 3.8, "observed order {order}");
    }

    #[test]
    fn blow_up_returns_partial_trajectory() {
        let sys = OdeSystem::new(
            OdeKind::FirstOrder,
            1.0,
            Box::new(|w: &[f64]| w.iter().map(|x| -x * x * x).collect()),
            vec![10.0],
        )
        .unwrap();
        match integrate(&sys, 0.0, 10.0, 0.1) {
            Err(DcfError::OdeBlowUp { partial, .. }) => assert!(!partial.times.is_empty()),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn velocity_rules() {
        let first = OdeSystem::new(OdeKind::FirstOrder, 1.0, scalar_quadratic(1.0), vec![0.0]).unwrap();
        assert!(first.with_velocity(vec![1.0]).is_err());
        assert!(OdeSystem::new(OdeKind::Accelerated { r: 2.0 }, 1.0, scalar_quadratic(1.0), vec![0.0]).is_err());
        assert!(OdeSystem::new(OdeKind::FirstOrder, 2.0, scalar_quadratic(1.0), vec![0.0]).is_err());
    }
}
