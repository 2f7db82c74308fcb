use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::label::{gaussian_label, LabelMap};
use super::mask::{build_mask, MaskPair};
use crate::error::{DcfError, Result};
use crate::numeric::pairwise_sum;
use crate::spectral::{fft2_channels, ifft2_channels, FeatureTensor, SpectrumTensor, StoredTensor};

/// One filter-learning problem.
///
/// The feature spectrum is held in the *correlation convention*:
/// `xhat = N · conj(F(X))`, with `F` the orthonormal DFT. With that
/// convention the data term is a plain elementwise product,
/// `‖Σ_k xhat_k ⊙ F(W_k) − F(Y)‖²`, and it equals the spatial objective
/// `‖Σ_k X_k ⊛ W_k − Y‖²` where `(X ⊛ W)(τ) = Σ_n X(n)·W(n+τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    xhat: SpectrumTensor,
    label: LabelMap,
    mask: MaskPair,
    rho: f64,
}

/// Spatial features to the correlation convention, `N · conj(F(X))`.
pub fn correlation_spectrum(x: &FeatureTensor) -> Result<SpectrumTensor> {
    Ok(fft2_channels(x)?.conj().scaled(x.n() as f64))
}

/// JSON sidecar stored next to a problem's `.dcft` feature spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub struct ProblemSidecar {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "C")]
    pub c: usize,
    pub lambda1: f64,
    pub lambda2: f64,
    pub rho: f64,
    pub target_h: usize,
    pub target_w: usize,
    pub sigma: f64,
}

impl ProblemInstance {
    /// Builds a problem from spatial features.
    pub fn from_features(x: &FeatureTensor, label: LabelMap, mask: MaskPair, rho: f64) -> Result<Self> {
        Self::from_spectrum(correlation_spectrum(x)?, label, mask, rho)
    }

    /// Builds a problem from a feature spectrum already in the correlation
    /// convention (see the type docs).
    pub fn from_spectrum(xhat: SpectrumTensor, label: LabelMap, mask: MaskPair, rho: f64) -> Result<Self> {
        if label.n() != xhat.n() || mask.n() != xhat.n() {
            return Err(DcfError::Shape(format!(
                "grid sides disagree: features {}, label {}, mask {}",
                xhat.n(),
                label.n(),
                mask.n()
            )));
        }
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(DcfError::InvalidParameter(format!("rho must be positive, got {rho}")));
        }
        Ok(Self { xhat, label, mask, rho })
    }

    pub fn n(&self) -> usize {
        self.xhat.n()
    }

    pub fn channels(&self) -> usize {
        self.xhat.channels()
    }

    /// Number of filter coefficients, `N·N·C`.
    pub fn size(&self) -> usize {
        self.xhat.len()
    }

    pub fn xhat(&self) -> &SpectrumTensor {
        &self.xhat
    }

    pub fn label(&self) -> &LabelMap {
        &self.label
    }

    pub fn yhat(&self) -> &[Complex64] {
        self.label.spectrum()
    }

    pub fn mask(&self) -> &MaskPair {
        &self.mask
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        Self::from_spectrum(self.xhat.clone(), self.label.clone(), self.mask.clone(), rho)
    }

    pub fn with_features(&self, xhat: SpectrumTensor) -> Result<Self> {
        if !xhat.same_shape(&self.xhat) {
            return Err(DcfError::Shape("replacement features change the problem shape".into()));
        }
        Self::from_spectrum(xhat, self.label.clone(), self.mask.clone(), self.rho)
    }

    fn check_filter(&self, w: &FeatureTensor) -> Result<()> {
        if w.n() != self.n() || w.channels() != self.channels() {
            return Err(DcfError::Shape(format!(
                "filter is {}x{}x{}, problem is {}x{}x{}",
                w.n(),
                w.n(),
                w.channels(),
                self.n(),
                self.n(),
                self.channels()
            )));
        }
        Ok(())
    }

    /// Per-bin data residual `Σ_k xhat_k ⊙ what_k − yhat`.
    pub(crate) fn data_residual(&self, what: &SpectrumTensor) -> Vec<Complex64> {
        let mut r: Vec<Complex64> = self.yhat().iter().map(|y| -y).collect();
        for k in 0..self.channels() {
            for ((acc, x), w) in r.iter_mut().zip(self.xhat.channel(k)).zip(what.channel(k)) {
                *acc += x * w;
            }
        }
        r
    }

    pub(crate) fn regularizer(&self, w: &FeatureTensor) -> f64 {
        let p = self.mask.penalty();
        let nn = p.len();
        let terms: Vec<f64> = w
            .as_slice()
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let pv = p[idx % nn] * v;
                pv * pv
            })
            .collect();
        self.mask.lambda1() * pairwise_sum(&terms)
    }

    /// Upper bound on the Lipschitz constant of `∇Λ` (spectral norm of the
    /// Hessian): `2·(max_bin ‖xhat_bin‖² + λ₁·max P²)`.
    pub fn gradient_lipschitz_bound(&self) -> f64 {
        let nn = self.n() * self.n();
        let mut worst = 0.0_f64;
        for b in 0..nn {
            let s: f64 = (0..self.channels()).map(|k| self.xhat.channel(k)[b].norm_sqr()).sum();
            worst = worst.max(s);
        }
        let pmax = self.mask.penalty().iter().fold(0.0_f64, |a, p| a.max(p * p));
        2.0 * (worst + self.mask.lambda1() * pmax)
    }

    pub fn sidecar(&self) -> ProblemSidecar {
        let (target_h, target_w) = self.mask.target();
        ProblemSidecar {
            n: self.n(),
            c: self.channels(),
            lambda1: self.mask.lambda1(),
            lambda2: self.mask.lambda2(),
            rho: self.rho,
            target_h,
            target_w,
            sigma: self.label.sigma(),
        }
    }

    /// Writes `<stem>.dcft` (feature spectrum) and `<stem>.json` (sidecar).
    pub fn save(&self, stem: impl AsRef<Path>) -> Result<()> {
        let (bin, json) = sidecar_paths(stem.as_ref());
        self.xhat.save(&bin)?;
        let text = serde_json::to_string_pretty(&self.sidecar())?;
        fs::write(&json, text).map_err(|e| DcfError::io(&json, e))
    }

    /// Reads a problem written by [`ProblemInstance::save`]. The label is
    /// rebuilt as a Gaussian from the recorded sigma.
    pub fn load(stem: impl AsRef<Path>) -> Result<Self> {
        let (bin, json) = sidecar_paths(stem.as_ref());
        let text = fs::read_to_string(&json).map_err(|e| DcfError::io(&json, e))?;
        let meta: ProblemSidecar = serde_json::from_str(&text)?;
        let xhat = match StoredTensor::load(&bin)? {
            StoredTensor::Complex(s) => s,
            StoredTensor::Real(_) => return Err(DcfError::Format(format!("{} holds a real tensor", bin.display()))),
        };
        if xhat.n() != meta.n || xhat.channels() != meta.c {
            return Err(DcfError::Format("sidecar shape disagrees with tensor file".into()));
        }
        let label = gaussian_label(meta.n, meta.sigma)?;
        let mask = build_mask(meta.n, (meta.target_h, meta.target_w), meta.lambda1, meta.lambda2)?;
        Self::from_spectrum(xhat, label, mask, meta.rho)
    }
}

fn sidecar_paths(stem: &Path) -> (PathBuf, PathBuf) {
    (stem.with_extension("dcft"), stem.with_extension("json"))
}

/// `Λ(W) = ‖Σ_k xhat_k ⊙ F(W_k) − yhat‖² + λ₁ Σ_k ‖W_k ⊙ P‖²`.
pub fn evaluate_objective(w: &FeatureTensor, prob: &ProblemInstance) -> Result<f64> {
    prob.check_filter(w)?;
    let what = fft2_channels(w)?;
    Ok(objective_from_parts(prob, w, &what))
}

pub(crate) fn objective_from_parts(prob: &ProblemInstance, w: &FeatureTensor, what: &SpectrumTensor) -> f64 {
    let residual = prob.data_residual(what);
    let mags: Vec<f64> = residual.iter().map(|r| r.norm_sqr()).collect();
    pairwise_sum(&mags) + prob.regularizer(w)
}

/// Spatial gradient of `Λ`: `2·F⁻¹(conj(xhat_k) ⊙ residual) + 2λ₁·P²⊙W_k`.
pub fn objective_gradient(w: &FeatureTensor, prob: &ProblemInstance) -> Result<FeatureTensor> {
    prob.check_filter(w)?;
    let what = fft2_channels(w)?;
    let residual = prob.data_residual(&what);
    let mut g = SpectrumTensor::zeros(prob.n(), prob.channels());
    let nn = prob.n() * prob.n();
    for k in 0..prob.channels() {
        let xk = prob.xhat().channel(k);
        let gk = &mut g.as_mut_slice()[k * nn..(k + 1) * nn];
        for ((dst, x), r) in gk.iter_mut().zip(xk).zip(&residual) {
            *dst = x.conj() * r * 2.0;
        }
    }
    let mut grad = ifft2_channels(&g)?;
    let p = prob.mask().penalty();
    let two_l1 = 2.0 * prob.mask().lambda1();
    for (idx, (gv, wv)) in grad.as_mut_slice().iter_mut().zip(w.as_slice()).enumerate() {
        let pv = p[idx % nn];
        *gv += two_l1 * pv * pv * wv;
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_problem(seed: u64, n: usize, c: usize, lambda2: f64) -> (ProblemInstance, FeatureTensor) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = FeatureTensor::from_fn(n, c, |_, _, _| rng.random_range(-1.0..1.0)).unwrap();
        let label = gaussian_label(n, 1.0).unwrap();
        let mask = build_mask(n, (n / 2, n / 2), 2.0, lambda2).unwrap();
        let prob = ProblemInstance::from_features(&x, label, mask, 1.0).unwrap();
        (prob, x)
    }

    #[test]
    fn zero_filter_gives_label_energy() {
        let (prob, _) = random_problem(1, 8, 3, 5.0);
        let w = FeatureTensor::zeros(8, 3);
        let lam = evaluate_objective(&w, &prob).unwrap();
        let y2: f64 = prob.label().values().iter().map(|v| v * v).sum();
        assert!((lam - y2).abs() < 1e-12);
    }

    #[test]
    fn two_by_two_all_ones_case() {
        // Stored spectrum all ones, label spectrum all ones, W spectrum all ones.
        let n = 2;
        let xhat = SpectrumTensor::new(n, 1, vec![Complex64::new(1.0, 0.0); 4]).unwrap();
        let label = LabelMap::from_values(n, vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(label
            .spectrum()
            .iter()
            .all(|v| (v - Complex64::new(1.0, 0.0)).norm() < 1e-15));
        let mask = build_mask(n, (2, 2), 1.0, 0.0).unwrap();
        let prob = ProblemInstance::from_spectrum(xhat, label, mask, 1.0).unwrap();
        // F⁻¹(ones) is an impulse of height 2 at the origin.
        let w = FeatureTensor::new(n, 1, vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        // Direct summation over the four bins: data 0, regularizer 1·(2² + 0 + 0 + 0).
        let mut data = 0.0;
        let what = fft2_channels(&w).unwrap();
        for b in 0..4 {
            data += (what.as_slice()[b] - Complex64::new(1.0, 0.0)).norm_sqr();
        }
        assert!(data < 1e-24);
        let lam = evaluate_objective(&w, &prob).unwrap();
        assert!((lam - 4.0).abs() < 1e-12);
    }

    #[test]
    fn objective_is_non_negative() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for seed in 0..100 {
            let (prob, _) = random_problem(seed, 4, 2, 10.0);
            let w = FeatureTensor::from_fn(4, 2, |_, _, _| rng.random_range(-3.0..3.0)).unwrap();
            assert!(evaluate_objective(&w, &prob).unwrap() >= 0.0);
        }
    }

    #[test]
    fn regularizer_gradient_on_background_cell() {
        let n = 4;
        let xhat = SpectrumTensor::zeros(n, 1);
        let label = LabelMap::from_values(n, vec![0.0; 16]).unwrap();
        let (l1, l2) = (10.0, 100.0);
        let mask = build_mask(n, (2, 2), l1, l2).unwrap();
        let prob = ProblemInstance::from_spectrum(xhat, label, mask, 1.0).unwrap();
        let mut w = FeatureTensor::zeros(n, 1);
        w.set(0, 0, 0, 0.3);
        let g = objective_gradient(&w, &prob).unwrap();
        let expected = 2.0 * l1 * (1.0 + l2 / l1) * 0.3;
        assert!((g.get(0, 0, 0) - expected).abs() < 1e-12);
        assert!(g.as_slice()[1..].iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let (prob, _) = random_problem(2, 8, 2, 1.0);
        assert!(evaluate_objective(&FeatureTensor::zeros(8, 3), &prob).is_err());
        assert!(objective_gradient(&FeatureTensor::zeros(4, 2), &prob).is_err());
    }

    #[test]
    fn sidecar_round_trip() {
        let (prob, _) = random_problem(5, 8, 2, 3.0);
        let dir = tempfile::tempdir().unwrap();
        let stem = dir.path().join("problem");
        prob.save(&stem).unwrap();
        let text = fs::read_to_string(stem.with_extension("json")).unwrap();
        for key in [
            "\"N\"", "\"C\"", "lambda1", "lambda2", "rho", "target_h", "target_w", "sigma",
        ] {
            assert!(text.contains(key), "missing {key}");
        }
        let back = ProblemInstance::load(&stem).unwrap();
        assert_eq!(back, prob);
    }
}
