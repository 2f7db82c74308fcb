use crate::error::{DcfError, Result};
use crate::objective::ProblemInstance;
use crate::spectral::{fft2_channels, FeatureTensor, SpectrumTensor};

/// Full iterate set of the solvers.
///
/// For the non-accelerated variants `w_prime == w` and `t_prime == t` after
/// every step.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub uhat: SpectrumTensor,
    pub w: FeatureTensor,
    /// Scaled Lagrange multiplier.
    pub t: FeatureTensor,
    pub w_prime: FeatureTensor,
    pub t_prime: FeatureTensor,
    /// Iteration counter `l`.
    pub iter: usize,
    /// Momentum `μ = l/(l+r)` used by the most recent extrapolation.
    pub momentum: f64,
}

impl SolverState {
    /// All-zero start.
    pub fn zeros(n: usize, channels: usize) -> Self {
        let z = FeatureTensor::zeros(n, channels);
        Self {
            uhat: SpectrumTensor::zeros(n, channels),
            w: z.clone(),
            t: z.clone(),
            w_prime: z.clone(),
            t_prime: z,
            iter: 0,
            momentum: 0.0,
        }
    }

    /// The fixed point associated with a minimizer `w` of `Λ`:
    /// `Û = F(w)`, multiplier `T = 2λ₁·P²⊙w/ρ`, no pending extrapolation.
    pub fn stationary(prob: &ProblemInstance, w: &FeatureTensor, rho: f64) -> Result<Self> {
        if w.n() != prob.n() || w.channels() != prob.channels() {
            return Err(DcfError::Shape("stationary state shape differs from problem".into()));
        }
        let nn = prob.n() * prob.n();
        let p = prob.mask().penalty();
        let scale = 2.0 * prob.mask().lambda1() / rho;
        let t = FeatureTensor::new(
            w.n(),
            w.channels(),
            w.as_slice()
                .iter()
                .enumerate()
                .map(|(idx, v)| scale * p[idx % nn] * p[idx % nn] * v)
                .collect(),
        )?;
        Ok(Self {
            uhat: fft2_channels(w)?,
            w: w.clone(),
            t: t.clone(),
            w_prime: w.clone(),
            t_prime: t,
            iter: 0,
            momentum: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.w.n()
    }

    pub fn channels(&self) -> usize {
        self.w.channels()
    }

    /// Restarts the momentum schedule while keeping all iterates.
    pub fn reset_schedule(&mut self) {
        self.iter = 0;
        self.momentum = 0.0;
    }

    pub(crate) fn check_against(&self, prob: &ProblemInstance) -> Result<()> {
        let shapes = [
            (self.uhat.n(), self.uhat.channels()),
            (self.w.n(), self.w.channels()),
            (self.t.n(), self.t.channels()),
            (self.w_prime.n(), self.w_prime.channels()),
            (self.t_prime.n(), self.t_prime.channels()),
        ];
        if shapes.iter().any(|s| *s != (prob.n(), prob.channels())) {
            return Err(DcfError::Shape("warm-start state does not match the problem".into()));
        }
        Ok(())
    }
}
