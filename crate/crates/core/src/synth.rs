//! Deterministic random problem instances.
//!
//! Features are drawn as i.i.d. Gaussian cells in the spatial domain, which
//! is the same as drawing Gaussian spectra and symmetrizing them so every
//! bin pair `(i,j)`, `(−i,−j)` is conjugate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::objective::{build_mask, gaussian_label, ProblemInstance};
use crate::spectral::FeatureTensor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub n: usize,
    pub channels: usize,
    /// Target region `(height, width)` in cells.
    pub target: (usize, usize),
    pub lambda1: f64,
    pub lambda2: f64,
    pub rho: f64,
    /// Standard deviation of each spatial feature cell.
    pub feature_std: f64,
    /// Label width in cells; `None` means `sqrt(h·w)/10`.
    pub sigma: Option<f64>,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            n: 32,
            channels: 12,
            target: (8, 8),
            lambda1: 10.0,
            lambda2: 100.0,
            rho: 1.0,
            feature_std: 0.1,
            sigma: None,
        }
    }
}

impl SyntheticSpec {
    pub fn label_sigma(&self) -> f64 {
        self.sigma
            .unwrap_or_else(|| ((self.target.0 * self.target.1) as f64).sqrt() / 10.0)
    }

    pub fn features(&self, seed: u64) -> Result<FeatureTensor> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let std = self.feature_std;
        FeatureTensor::from_fn(self.n, self.channels, |_, _, _| {
            let z: f64 = StandardNormal.sample(&mut rng);
            std * z
        })
    }

    pub fn instance(&self, x: &FeatureTensor) -> Result<ProblemInstance> {
        ProblemInstance::from_features(
            x,
            gaussian_label(self.n, self.label_sigma())?,
            build_mask(self.n, self.target, self.lambda1, self.lambda2)?,
            self.rho,
        )
    }

    pub fn generate(&self, seed: u64) -> Result<ProblemInstance> {
        self.instance(&self.features(seed)?)
    }

    /// A sequence of problems whose features drift by a random walk:
    /// `X[f+1] = X[f] + drift·feature_std·Z`.
    pub fn drifting_sequence(&self, seed: u64, frames: usize, drift: f64) -> Result<Vec<ProblemInstance>> {
        let mut x = self.features(seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let step = drift * self.feature_std;
        let mut out = Vec::with_capacity(frames);
        for f in 0..frames {
            if f > 0 {
                let noise = FeatureTensor::from_fn(self.n, self.channels, |_, _, _| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z
                })?;
                x = x.lin_comb(1.0, &noise, step);
            }
            out.push(self.instance(&x)?);
        }
        Ok(out)
    }
}
