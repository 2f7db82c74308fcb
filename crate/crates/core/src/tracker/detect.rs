use num_complex::Complex64;

use crate::error::Result;
use crate::objective::correlation_spectrum;
use crate::spectral::{fft2_channels, ifft2_channels, FeatureTensor, SpectrumTensor};

/// Correlation response and the implied target motion.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Real `N×N` response, row-major.
    pub response: Vec<f64>,
    /// Bin of the maximum response.
    pub peak: (usize, usize),
    pub peak_value: f64,
    /// Target motion in cells as `(rows, cols)`, sub-cell refined.
    pub displacement: (f64, f64),
}

/// Response of `filter` to `features`, `ℱ⁻¹(Σ_k N·conj(F(Z_k))·F(W_k))`.
///
/// The response at lag `τ` is `Σ_n Z(n)·W(n+τ)`, so content moved by `d`
/// peaks at `τ = −d`; the reported displacement is the negated, wrapped peak.
pub fn detect(filter: &FeatureTensor, features: &FeatureTensor) -> Result<Detection> {
    filter.ensure_same_shape(features, "detection features")?;
    let n = filter.n();
    let zhat = correlation_spectrum(features)?;
    let prod = zhat.mul_elementwise(&fft2_channels(filter)?).sum_channels();
    let response = ifft2_channels(&SpectrumTensor::new(n, 1, prod)?)?.into_vec();

    // First maximum in row-major order wins ties.
    let mut best = 0;
    for (idx, &v) in response.iter().enumerate() {
        if v > response[best] {
            best = idx;
        }
    }
    let peak = (best / n, best % n);
    let (di, dj) = refine_peak(&response, n, peak);
    let displacement = (wrap_negated(peak.0, n) - di, wrap_negated(peak.1, n) - dj);
    Ok(Detection {
        peak_value: response[best],
        response,
        peak,
        displacement,
    })
}

/// Spectrum of the response before the inverse transform; exposed so
/// callers can check Hermitian symmetry.
pub fn response_spectrum(filter: &FeatureTensor, features: &FeatureTensor) -> Result<Vec<Complex64>> {
    filter.ensure_same_shape(features, "detection features")?;
    let zhat = correlation_spectrum(features)?;
    Ok(zhat.mul_elementwise(&fft2_channels(filter)?).sum_channels())
}

/// `−p mod n` as a signed offset in `(−n/2, n/2]`.
fn wrap_negated(p: usize, n: usize) -> f64 {
    let v = (n - p % n) % n;
    if 2 * v > n {
        v as f64 - n as f64
    } else {
        v as f64
    }
}

/// Peak offset from a least-squares quadratic over the 3×3 neighbourhood,
/// clamped to half a cell; zero unless the fit is a strict maximum.
fn refine_peak(r: &[f64], n: usize, (pi, pj): (usize, usize)) -> (f64, f64) {
    let (mut s, mut su, mut sv, mut suu, mut svv, mut suv) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for a in -1i64..=1 {
        for b in -1i64..=1 {
            let i = (pi as i64 + a).rem_euclid(n as i64) as usize;
            let j = (pj as i64 + b).rem_euclid(n as i64) as usize;
            let v = r[i * n + j];
            let (a, b) = (a as f64, b as f64);
            s += v;
            su += a * v;
            sv += b * v;
            suu += a * a * v;
            svv += b * b * v;
            suv += a * b * v;
        }
    }
    let gu = su / 6.0;
    let gv = sv / 6.0;
    let huu = suu - 2.0 * s / 3.0;
    let hvv = svv - 2.0 * s / 3.0;
    let huv = suv / 4.0;
    let det = huu * hvv - huv * huv;
    if !(huu < 0.0 && det > 0.0) {
        return (0.0, 0.0);
    }
    let du = -(hvv * gu - huv * gv) / det;
    let dv = -(huu * gv - huv * gu) / det;
    (du.clamp(-0.5, 0.5), dv.clamp(-0.5, 0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{build_mask, gaussian_label, ProblemInstance};
    use crate::solver::{run_solver, SolverConfig};
    use crate::spectral::ifft2_complex;
    use crate::synth::SyntheticSpec;

    fn trained() -> (FeatureTensor, FeatureTensor) {
        let spec = SyntheticSpec {
            n: 16,
            channels: 3,
            target: (4, 4),
            ..SyntheticSpec::default()
        };
        let x = spec.features(3).unwrap();
        let prob = ProblemInstance::from_features(
            &x,
            gaussian_label(16, 0.6).unwrap(),
            build_mask(16, (4, 4), 10.0, 100.0).unwrap(),
            1.0,
        )
        .unwrap();
        let cfg = SolverConfig {
            max_iters: 200,
            tol: 0.0,
            ..SolverConfig::default()
        };
        (run_solver(&prob, &cfg, None).unwrap().0, x)
    }

    #[test]
    fn training_patch_gives_zero_displacement() {
        let (w, x) = trained();
        let d = detect(&w, &x).unwrap();
        assert_eq!(d.peak, (0, 0));
        assert!(d.displacement.0.abs() <= 0.5 && d.displacement.1.abs() <= 0.5);
    }

    #[test]
    fn shifted_features_give_the_shift() {
        let (w, x) = trained();
        let d = detect(&w, &x.circshift(2, 1)).unwrap();
        assert!((d.displacement.0 - 2.0).abs() <= 0.5, "{:?}", d.displacement);
        assert!((d.displacement.1 - 1.0).abs() <= 0.5, "{:?}", d.displacement);
        let d = detect(&w, &x.circshift(-3, 5)).unwrap();
        assert!((d.displacement.0 + 3.0).abs() <= 0.5 && (d.displacement.1 - 5.0).abs() <= 0.5);
    }

    #[test]
    fn zero_filter_is_flat() {
        let (_, x) = trained();
        let d = detect(&FeatureTensor::zeros(16, 3), &x).unwrap();
        assert!(d.response.iter().all(|&v| v == 0.0));
        assert_eq!(d.displacement, (0.0, 0.0));
    }

    #[test]
    fn response_is_real() {
        let (w, x) = trained();
        let spec = response_spectrum(&w, &x).unwrap();
        let r = ifft2_complex(&SpectrumTensor::new(16, 1, spec).unwrap());
        let im: f64 = r.as_slice().iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
        assert!(im / r.norm() < 1e-8);
    }

    #[test]
    fn quadratic_peak_is_recovered() {
        let n = 8;
        let (ci, cj) = (3.2, 4.7);
        let r: Vec<f64> = (0..n * n)
            .map(|idx| {
                let (i, j) = ((idx / n) as f64, (idx % n) as f64);
                10.0 - (i - ci).powi(2) - 2.0 * (j - cj).powi(2)
            })
            .collect();
        let (du, dv) = refine_peak(&r, n, (3, 5));
        assert!((du - 0.2).abs() < 1e-12 && (dv + 0.3).abs() < 1e-12, "{du} {dv}");
    }

    #[test]
    fn wrap_range() {
        assert_eq!(wrap_negated(0, 8), 0.0);
        assert_eq!(wrap_negated(1, 8), -1.0);
        assert_eq!(wrap_negated(7, 8), 1.0);
        assert_eq!(wrap_negated(4, 8), 4.0);
    }
}
