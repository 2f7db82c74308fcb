//! Independent reference computations used by the integration and
//! acceptance tests. Nothing here calls the FFT or the solvers.
#![allow(dead_code)]

use std::f64::consts::TAU;

use dcf_admm::objective::{build_mask, gaussian_label, MaskPair, ProblemInstance};
use dcf_admm::spectral::FeatureTensor;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, n: usize, c: usize, scale: f64) -> FeatureTensor {
    FeatureTensor::from_fn(n, c, |_, _, _| rng.random_range(-scale..scale)).unwrap()
}

/// Orthonormal 2-D DFT of one channel by direct summation, `O(N⁴)`.
pub fn dft_channel(x: &[f64], n: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    for u in 0..n {
        for v in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                for j in 0..n {
                    let phase = -TAU * ((u * i + v * j) % n) as f64 / n as f64;
                    acc += Complex64::from_polar(x[i * n + j], phase);
                }
            }
            out[u * n + v] = acc / n as f64;
        }
    }
    out
}

pub fn dft(x: &FeatureTensor) -> Vec<Complex64> {
    (0..x.channels())
        .flat_map(|k| dft_channel(x.channel(k), x.n()))
        .collect()
}

/// `Σ_k Σ_n X_k(n)·W_k(n+τ)` for every lag `τ`, circular indices.
pub fn spatial_response(x: &FeatureTensor, w: &FeatureTensor) -> Vec<f64> {
    let n = x.n();
    let mut r = vec![0.0; n * n];
    for ti in 0..n {
        for tj in 0..n {
            let mut acc = 0.0;
            for k in 0..x.channels() {
                for i in 0..n {
                    for j in 0..n {
                        acc += x.get(i, j, k) * w.get((i + ti) % n, (j + tj) % n, k);
                    }
                }
            }
            r[ti * n + tj] = acc;
        }
    }
    r
}

/// `‖Σ_k X_k ⊛ W_k − Y‖² + λ₁‖W⊙P‖²` evaluated entirely in the spatial domain,
/// with `P` built from the indicator as `sqrt(1 + (λ₂/λ₁)·B)`.
pub fn spatial_objective(x: &FeatureTensor, w: &FeatureTensor, y: &[f64], mask: &MaskPair) -> f64 {
    let r = spatial_response(x, w);
    let data: f64 = r.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
    let nn = x.n() * x.n();
    let (l1, l2) = (mask.lambda1(), mask.lambda2());
    let b = mask.indicator();
    let reg: f64 = w
        .as_slice()
        .iter()
        .enumerate()
        .map(|(idx, v)| l1 * v * v + l2 * (v * b[idx % nn]).powi(2))
        .sum();
    data + reg
}

/// Central finite-difference gradient of `f` at `w`.
pub fn finite_difference(w: &FeatureTensor, h: f64, f: impl Fn(&FeatureTensor) -> f64) -> Vec<f64> {
    (0..w.len())
        .map(|idx| {
            let bump = |s: f64| {
                let mut d = w.as_slice().to_vec();
                d[idx] += s;
                FeatureTensor::new(w.n(), w.channels(), d).unwrap()
            };
            (f(&bump(h)) - f(&bump(-h))) / (2.0 * h)
        })
        .collect()
}

/// Dense complex linear solve by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)]
pub fn dense_solve(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&p, &q| a[p][col].norm().total_cmp(&a[q][col].norm()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                let t = a[col][k];
                a[row][k] -= f * t;
            }
            let t = b[col];
            b[row] -= f * t;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Minimiser of `|xᵀu − y|² + (ρ/2)‖u − a‖²` over `u ∈ ℂ^C`:
/// `(x̄xᵀ + (ρ/2)I)u = x̄y + (ρ/2)a`.
pub fn bin_solve_dense(x: &[Complex64], y: Complex64, a: &[Complex64], rho: f64) -> Vec<Complex64> {
    let c = x.len();
    let m = (0..c)
        .map(|i| {
            (0..c)
                .map(|j| x[i].conj() * x[j] + if i == j { rho / 2.0 } else { 0.0 })
                .collect()
        })
        .collect();
    let rhs = (0..c).map(|i| x[i].conj() * y + a[i] * (rho / 2.0)).collect();
    dense_solve(m, rhs)
}

/// Minimiser of `Λ` when `λ₂ = 0`, solved bin by bin with a dense solve of
/// `(x̄xᵀ + λ₁I)û = x̄ŷ` and mapped back by direct inverse DFT summation.
pub fn ridge_oracle(prob: &ProblemInstance) -> FeatureTensor {
    let (n, c) = (prob.n(), prob.channels());
    let nn = n * n;
    let l1 = prob.mask().lambda1();
    let x = prob.xhat().as_slice();
    let mut what = vec![Complex64::new(0.0, 0.0); nn * c];
    for bin in 0..nn {
        let xb: Vec<Complex64> = (0..c).map(|k| x[k * nn + bin]).collect();
        let m = (0..c)
            .map(|i| {
                (0..c)
                    .map(|j| xb[i].conj() * xb[j] + if i == j { l1 } else { 0.0 })
                    .collect()
            })
            .collect();
        let rhs = (0..c).map(|i| xb[i].conj() * prob.yhat()[bin]).collect();
        for (k, u) in dense_solve(m, rhs).into_iter().enumerate() {
            what[k * nn + bin] = u;
        }
    }
    FeatureTensor::from_fn(n, c, |i, j, k| {
        let mut acc = Complex64::new(0.0, 0.0);
        for u in 0..n {
            for v in 0..n {
                let phase = TAU * ((u * i + v * j) % n) as f64 / n as f64;
                acc += what[k * nn + u * n + v] * Complex64::from_polar(1.0, phase);
            }
        }
        acc.re / n as f64
    })
    .unwrap()
}

/// Random problem with uniform features on `[-scale, scale]`.
pub fn random_problem(seed: u64, n: usize, c: usize, lambda2: f64, scale: f64) -> (FeatureTensor, ProblemInstance) {
    let mut r = rng(seed);
    let x = random_tensor(&mut r, n, c, scale);
    let target = (n / 2, n / 2);
    let prob = ProblemInstance::from_features(
        &x,
        gaussian_label(n, ((target.0 * target.1) as f64).sqrt() / 10.0).unwrap(),
        build_mask(n, target, 10.0, lambda2).unwrap(),
        1.0,
    )
    .unwrap();
    (x, prob)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
