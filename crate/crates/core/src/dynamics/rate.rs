use std::fmt::Write as _;

use super::ode::Trajectory;
use crate::error::{DcfError, Result};
use crate::solver::Variant;

/// Samples earlier than this are excluded from rate fits (the accelerated
/// system is singular at `t = 0`).
pub const T_MIN: f64 = 0.5;

const MIN_SAMPLES: usize = 20;

pub const TRAJECTORY_CSV_HEADER: &str = "t,objective,suboptimality,dist_to_opt";

/// Least-squares fit of `log(Λ(W(t)) − Λ*)` against `log t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in log space.
    pub residual: f64,
    /// Reference optimum `Λ*`.
    pub optimum: f64,
    pub samples_used: usize,
}

/// Windowed check of `t^p·(Λ(W(t)) − Λ*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub power: f64,
    pub first_window_max: f64,
    pub last_window_max: f64,
    /// `last_window_max / first_window_max`.
    pub ratio: f64,
    pub overall_max: f64,
}

/// Fits the decay exponent of the suboptimality from `(t, Λ)` samples.
/// Samples with `t < T_MIN` or non-positive suboptimality are skipped.
pub fn fit_decay_rate(samples: &[(f64, f64)], optimum: f64) -> Result<RateFit> {
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(t, obj)| *t >= T_MIN && obj - optimum > 0.0)
        .map(|(t, obj)| (t.ln(), (obj - optimum).ln()))
        .collect();
    if points.len() < MIN_SAMPLES {
        return Err(DcfError::InvalidParameter(format!(
            "rate fit needs at least {MIN_SAMPLES} usable samples with t >= {T_MIN}, got {}",
            points.len()
        )));
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(DcfError::InvalidParameter("rate fit needs distinct times".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(RateFit {
        slope,
        intercept,
        residual: (sse / m).sqrt(),
        optimum,
        samples_used: points.len(),
    })
}

/// Compares the largest `t^power·(Λ − Λ*)` in the first and last
/// `window_fraction` of the samples (by count, after dropping `t < T_MIN`).
/// A bounded, non-diverging sequence has a ratio near or below one.
pub fn scaled_suboptimality_bound(
    samples: &[(f64, f64)],
    optimum: f64,
    power: f64,
    window_fraction: f64,
) -> Result<BoundCheck> {
    if !(window_fraction > 0.0 && window_fraction <= 0.5) {
        return Err(DcfError::InvalidParameter(format!(
            "window fraction must lie in (0, 0.5], got {window_fraction}"
        )));
    }
    let scaled: Vec<f64> = samples
        .iter()
        .filter(|(t, _)| *t >= T_MIN)
        .map(|(t, obj)| t.powf(power) * (obj - optimum).max(0.0))
        .collect();
    if scaled.len() < MIN_SAMPLES {
        return Err(DcfError::InvalidParameter(format!(
            "bound check needs at least {MIN_SAMPLES} samples with t >= {T_MIN}, got {}",
            scaled.len()
        )));
    }
    if scaled.iter().any(|v| !v.is_finite()) {
        return Err(DcfError::NonFinite("scaled suboptimality".into()));
    }
    let window = ((scaled.len() as f64 * window_fraction).ceil() as usize).max(1);
    let max_of = |s: &[f64]| s.iter().fold(0.0_f64, |a, b| a.max(*b));
    let first = max_of(&scaled[..window]);
    let last = max_of(&scaled[scaled.len() - window..]);
    let ratio = if first > 0.0 {
        last / first
    } else if last == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(BoundCheck {
        power,
        first_window_max: first,
        last_window_max: last,
        ratio,
        overall_max: max_of(&scaled),
    })
}

/// Leading constant of the continuous-time decay bound, with the largest
/// singular value of the unitary DFT equal to one:
/// `(2−α)(r−1)²` for R_A-ADMM (rate `1/t²`), `2−α` for R_ADMM and `1` for
/// ADMM (rate `1/t`).
pub fn reduced_rate_constant(variant: Variant, alpha: f64, r: f64) -> f64 {
    match variant {
        Variant::RAAdmm => (2.0 - alpha) * (r - 1.0).powi(2),
        Variant::RAdmm => 2.0 - alpha,
        Variant::Admm => 1.0,
    }
}

/// CSV export of a trajectory against a known optimum `(w_star, Λ*)`.
pub fn trajectory_csv(traj: &Trajectory, objective: impl Fn(&[f64]) -> f64, optimum: f64, w_star: &[f64]) -> String {
    let mut out = String::from(TRAJECTORY_CSV_HEADER);
    out.push('\n');
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let obj = objective(&s.w);
        let _ = writeln!(
            out,
            "{t:e},{obj:e},{:e},{:e}",
            obj - optimum,
            crate::numeric::distance(&s.w, w_star)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(power: f64) -> Vec<(f64, f64)> {
        (0..200)
            .map(|i| {
                let t = 1.0 + i as f64 * 0.5;
                (t, 3.0 + 2.5 / t.powf(power))
            })
            .collect()
    }

    #[test]
    fn recovers_inverse_square() {
        let fit = fit_decay_rate(&curve(2.0), 3.0).unwrap();
        assert!((fit.slope + 2.0).abs() < 0.01);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn recovers_inverse_linear() {
        let fit = fit_decay_rate(&curve(1.0), 3.0).unwrap();
        assert!((fit.slope + 1.0).abs() < 0.01);
    }

    #[test]
    fn too_few_samples() {
        let short: Vec<(f64, f64)> = curve(2.0).into_iter().take(10).collect();
        assert!(fit_decay_rate(&short, 3.0).is_err());
        let early: Vec<(f64, f64)> = (0..50).map(|i| (0.01 * i as f64, 1.0)).collect();
        assert!(fit_decay_rate(&early, 0.0).is_err());
    }

    #[test]
    fn bound_ratio_flags_divergence() {
        let ok = scaled_suboptimality_bound(&curve(2.0), 3.0, 2.0, 0.25).unwrap();
        assert!((ok.ratio - 1.0).abs() < 1e-9);
        let slow = scaled_suboptimality_bound(&curve(1.0), 3.0, 2.0, 0.25).unwrap();
        assert!(slow.ratio > 1.5);
    }

    #[test]
    fn reduced_constants() {
        assert!((reduced_rate_constant(Variant::RAAdmm, 1.1, 4.0) - 0.9 * 9.0).abs() < 1e-12);
        assert!((reduced_rate_constant(Variant::RAdmm, 1.1, 4.0) - 0.9).abs() < 1e-12);
        assert_eq!(reduced_rate_constant(Variant::Admm, 1.1, 4.0), 1.0);
    }
}
