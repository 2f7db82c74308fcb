use num_complex::Complex64;

use super::config::WStepMode;
use crate::error::{DcfError, Result};
use crate::objective::{MaskPair, ProblemInstance};
use crate::spectral::{fft2_channels, FeatureTensor, SpectrumTensor};

/// Exact `Û` update.
///
/// For every bin, minimizes `|xᵀû − ŷ|² + (ρ/2)‖û − ŵ′ + τ̂′‖²` over
/// `û ∈ ℂ^C`. The normal equations `(x̄xᵀ + ρ/2·I)û = x̄ŷ + ρ/2·â` are
/// inverted with Sherman–Morrison:
/// `û = (I − x̄xᵀ/(ρ/2 + xᵀx̄))·((2/ρ)x̄ŷ + â)`, `â = ŵ′ − τ̂′`.
pub fn solve_u_subproblem(
    prob: &ProblemInstance,
    w_ref: &FeatureTensor,
    t_ref: &FeatureTensor,
) -> Result<SpectrumTensor> {
    check_ref(prob, w_ref)?;
    check_ref(prob, t_ref)?;
    let ahat = fft2_channels(&w_ref.lin_comb(1.0, t_ref, -1.0))?;
    Ok(solve_u_bins(prob, &ahat, prob.rho()))
}

fn check_ref(prob: &ProblemInstance, t: &FeatureTensor) -> Result<()> {
    if t.n() != prob.n() || t.channels() != prob.channels() {
        return Err(DcfError::Shape("sub-problem operand does not match the problem".into()));
    }
    Ok(())
}

pub(crate) fn solve_u_bins(prob: &ProblemInstance, ahat: &SpectrumTensor, rho: f64) -> SpectrumTensor {
    let (n, c) = (prob.n(), prob.channels());
    let nn = n * n;
    let x = prob.xhat().as_slice();
    let y = prob.yhat();
    let a = ahat.as_slice();
    let mut out = SpectrumTensor::zeros(n, c);
    let u = out.as_mut_slice();
    let two_over_rho = 2.0 / rho;
    let half_rho = 0.5 * rho;
    let mut rhs = vec![Complex64::new(0.0, 0.0); c];
    for b in 0..nn {
        let mut energy = 0.0;
        let mut dot = Complex64::new(0.0, 0.0);
        for k in 0..c {
            let xk = x[k * nn + b];
            let r = xk.conj() * (y[b] * two_over_rho) + a[k * nn + b];
            rhs[k] = r;
            energy += xk.norm_sqr();
            dot += xk * r;
        }
        let coef = dot / (half_rho + energy);
        for k in 0..c {
            u[k * nn + b] = rhs[k] - x[k * nn + b].conj() * coef;
        }
    }
    out
}

/// Gradient (with respect to the real and imaginary parts, packed as a
/// complex number) of the per-bin `Û` objective at `uhat`:
/// `2x̄(xᵀû − ŷ) + ρ(û − â)`.
pub fn u_bin_gradient(
    prob: &ProblemInstance,
    uhat: &SpectrumTensor,
    w_ref: &FeatureTensor,
    t_ref: &FeatureTensor,
) -> Result<SpectrumTensor> {
    let ahat = fft2_channels(&w_ref.lin_comb(1.0, t_ref, -1.0))?;
    let (n, c) = (prob.n(), prob.channels());
    let nn = n * n;
    let x = prob.xhat().as_slice();
    let residual = prob.data_residual(uhat);
    let mut g = SpectrumTensor::zeros(n, c);
    for k in 0..c {
        for (b, res) in residual.iter().enumerate() {
            let idx = k * nn + b;
            g.as_mut_slice()[idx] =
                x[idx].conj() * res * 2.0 + (uhat.as_slice()[idx] - ahat.as_slice()[idx]) * prob.rho();
        }
    }
    Ok(g)
}

/// Relaxation `V̂ = α·Û + (1 − α)·F(W_prev)`.
pub fn relax_step(uhat: &SpectrumTensor, w_prev: &FeatureTensor, alpha: f64) -> Result<SpectrumTensor> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(DcfError::InvalidParameter(format!(
            "relaxation alpha {alpha} outside (0, 2]"
        )));
    }
    if uhat.n() != w_prev.n() || uhat.channels() != w_prev.channels() {
        return Err(DcfError::Shape("relaxation operands differ in shape".into()));
    }
    if alpha == 1.0 {
        return Ok(uhat.clone());
    }
    Ok(uhat.lin_comb(alpha, &fft2_channels(w_prev)?, 1.0 - alpha))
}

/// Per-cell `W` update minimizing `λ₁p²w² + (ρ/2)(v − w + τ′)²`.
pub fn solve_w_subproblem(
    v: &FeatureTensor,
    t_ref: &FeatureTensor,
    mask: &MaskPair,
    rho: f64,
    mode: WStepMode,
) -> Result<FeatureTensor> {
    v.ensure_same_shape(t_ref, "W sub-problem operands")?;
    if mask.n() != v.n() {
        return Err(DcfError::Shape("mask grid differs from filter grid".into()));
    }
    let nn = v.n() * v.n();
    let p = mask.penalty();
    let l1 = mask.lambda1();
    let data: Vec<f64> = match mode {
        WStepMode::Exact => v
            .as_slice()
            .iter()
            .zip(t_ref.as_slice())
            .enumerate()
            .map(|(idx, (vv, tt))| {
                let pv = p[idx % nn];
                rho * (vv + tt) / (2.0 * l1 * pv * pv + rho)
            })
            .collect(),
        WStepMode::Approximate => {
            let top = (1.0 + mask.lambda2() / l1).sqrt();
            let denom = 2.0 * l1 + rho;
            v.as_slice()
                .iter()
                .zip(t_ref.as_slice())
                .enumerate()
                .map(|(idx, (vv, tt))| (top - p[idx % nn]) * (rho * vv + tt) / denom)
                .collect()
        }
    };
    FeatureTensor::new(v.n(), v.channels(), data)
}

/// Gradient of the `W` sub-problem objective: `2λ₁p²w − ρ(v − w + τ′)`.
pub fn w_cell_gradient(
    w: &FeatureTensor,
    v: &FeatureTensor,
    t_ref: &FeatureTensor,
    mask: &MaskPair,
    rho: f64,
) -> FeatureTensor {
    let nn = w.n() * w.n();
    let p = mask.penalty();
    let l1 = mask.lambda1();
    let data = w
        .as_slice()
        .iter()
        .zip(v.as_slice())
        .zip(t_ref.as_slice())
        .enumerate()
        .map(|(idx, ((ww, vv), tt))| {
            let pv = p[idx % nn];
            2.0 * l1 * pv * pv * ww - rho * (vv - ww + tt)
        })
        .collect();
    FeatureTensor::new(w.n(), w.channels(), data).expect("finite inputs give finite gradient")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objective::{build_mask, gaussian_label};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn problem(seed: u64, c: usize, rho: f64) -> ProblemInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = FeatureTensor::from_fn(8, c, |_, _, _| rng.random_range(-1.0..1.0)).unwrap();
        ProblemInstance::from_features(
            &x,
            gaussian_label(8, 1.0).unwrap(),
            build_mask(8, (4, 4), 10.0, 100.0).unwrap(),
            rho,
        )
        .unwrap()
    }

    fn random_tensor(rng: &mut ChaCha8Rng, c: usize) -> FeatureTensor {
        FeatureTensor::from_fn(8, c, |_, _, _| rng.random_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn u_step_zeroes_its_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for c in [1, 3] {
            let prob = problem(c as u64, c, 1.0);
            let w = random_tensor(&mut rng, c);
            let t = random_tensor(&mut rng, c);
            let u = solve_u_subproblem(&prob, &w, &t).unwrap();
            let g = u_bin_gradient(&prob, &u, &w, &t).unwrap();
            assert!(g.norm() < 1e-9 * (1.0 + u.norm()), "gradient {}", g.norm());
        }
    }

    #[test]
    fn u_step_ignores_data_where_features_vanish() {
        let n = 4;
        let mut xhat = SpectrumTensor::zeros(n, 1);
        xhat.as_mut_slice()
            .iter_mut()
            .for_each(|v| *v = Complex64::new(0.5, 0.0));
        xhat.as_mut_slice()[0] = Complex64::new(0.0, 0.0);
        let prob = ProblemInstance::from_spectrum(
            xhat,
            gaussian_label(n, 1.0).unwrap(),
            build_mask(n, (2, 2), 1.0, 1.0).unwrap(),
            2.0,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = FeatureTensor::from_fn(n, 1, |_, _, _| rng.random_range(-1.0..1.0)).unwrap();
        let t = FeatureTensor::from_fn(n, 1, |_, _, _| rng.random_range(-1.0..1.0)).unwrap();
        let u = solve_u_subproblem(&prob, &w, &t).unwrap();
        let a = fft2_channels(&w.lin_comb(1.0, &t, -1.0)).unwrap();
        assert!((u.as_slice()[0] - a.as_slice()[0]).norm() < 1e-15);
    }

    #[test]
    fn huge_rho_returns_proximal_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let prob = problem(4, 2, 1e12);
        let w = random_tensor(&mut rng, 2);
        let t = random_tensor(&mut rng, 2);
        let u = solve_u_subproblem(&prob, &w, &t).unwrap();
        let a = fft2_channels(&w.lin_comb(1.0, &t, -1.0)).unwrap();
        for (x, y) in u.as_slice().iter().zip(a.as_slice()) {
            assert!((x - y).norm() < 1e-5);
        }
    }

    #[test]
    fn relaxation_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = random_tensor(&mut rng, 2);
        let u = fft2_channels(&random_tensor(&mut rng, 2)).unwrap();
        assert_eq!(relax_step(&u, &w, 1.0).unwrap(), u);

        let fw = fft2_channels(&w).unwrap();
        let fixed = relax_step(&fw, &w, 2.0).unwrap();
        for (a, b) in fixed.as_slice().iter().zip(fw.as_slice()) {
            assert!((a - b).norm() < 1e-14);
        }

        let v = relax_step(&u, &w, 1.10).unwrap();
        for ((vv, uu), ww) in v.as_slice().iter().zip(u.as_slice()).zip(fw.as_slice()) {
            let expected = uu * 1.10 + ww * (1.0 - 1.10);
            assert!((vv - expected).norm() < 1e-14);
        }
        assert!(relax_step(&u, &w, 0.0).is_err());
    }

    #[test]
    fn w_step_single_cell_value() {
        // p² = 11, λ₁ = 10, ρ = 1, v + τ′ = 1 → w = 1/221.
        let mask = build_mask(2, (1, 1), 10.0, 100.0).unwrap();
        let mut v = FeatureTensor::zeros(2, 1);
        v.set(1, 1, 0, 0.25);
        let mut t = FeatureTensor::zeros(2, 1);
        t.set(1, 1, 0, 0.75);
        // Cell (1,1) is background for a 1×1 target at (0,0).
        assert_eq!(mask.indicator()[3], 1.0);
        let w = solve_w_subproblem(&v, &t, &mask, 1.0, WStepMode::Exact).unwrap();
        assert!((w.get(1, 1, 0) - 1.0 / 221.0).abs() < 1e-15);

        // Independent check: golden-section search on the scalar objective.
        let f = |x: f64| 10.0 * 11.0 * x * x + 0.5 * (1.0 - x) * (1.0 - x);
        let (mut lo, mut hi) = (-1.0_f64, 1.0_f64);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let a = hi - phi * (hi - lo);
            let b = lo + phi * (hi - lo);
            if f(a) < f(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        assert!(((lo + hi) / 2.0 - 1.0 / 221.0).abs() < 1e-9);
    }

    #[test]
    fn w_step_unregularized_limit() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let v = random_tensor(&mut rng, 2);
        let t = random_tensor(&mut rng, 2);
        let mask = build_mask(8, (4, 4), 1e-300, 0.0).unwrap();
        let w = solve_w_subproblem(&v, &t, &mask, 1.0, WStepMode::Exact).unwrap();
        assert!(w.distance(&v.lin_comb(1.0, &t, 1.0)) < 1e-12);
    }

    #[test]
    fn exact_w_step_beats_approximate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mask = build_mask(8, (4, 4), 10.0, 100.0).unwrap();
        let rho = 1.0;
        let objective = |w: &FeatureTensor, v: &FeatureTensor, t: &FeatureTensor| {
            let p = mask.penalty();
            let mut acc = 0.0;
            for (idx, ((ww, vv), tt)) in w.as_slice().iter().zip(v.as_slice()).zip(t.as_slice()).enumerate() {
                let pv = p[idx % 64];
                acc += 10.0 * pv * pv * ww * ww + 0.5 * rho * (vv - ww + tt).powi(2);
            }
            acc
        };
        for _ in 0..20 {
            let v = random_tensor(&mut rng, 3);
            let t = random_tensor(&mut rng, 3);
            let baseline = objective(&v.lin_comb(1.0, &t, 1.0), &v, &t);
            let exact = solve_w_subproblem(&v, &t, &mask, rho, WStepMode::Exact).unwrap();
            let approx = solve_w_subproblem(&v, &t, &mask, rho, WStepMode::Approximate).unwrap();
            let (fe, fp) = (objective(&exact, &v, &t), objective(&approx, &v, &t));
            assert!(fe < baseline && fp < baseline);
            assert!(fe <= fp);
            let g = w_cell_gradient(&exact, &v, &t, &mask, rho);
            assert!(g.norm() < 1e-12);
        }
    }
}
