//! Reference minimizers used for validation and as known optima.

use num_complex::Complex64;

use super::problem::{objective_gradient, ProblemInstance};
use crate::error::{DcfError, Result};
use crate::spectral::{ifft2_channels, FeatureTensor, SpectrumTensor};

/// Closed-form minimizer when the penalty grid is uniform (`λ₂ = 0`).
///
/// Each frequency bin is then an independent ridge regression,
/// `ŵ = conj(x)·ŷ / (λ₁ + ‖x‖²)`.
pub fn ridge_solution(prob: &ProblemInstance) -> Result<FeatureTensor> {
    if prob.mask().lambda2() != 0.0 {
        return Err(DcfError::InvalidParameter(
            "closed-form ridge solution needs lambda2 = 0".into(),
        ));
    }
    let (n, c) = (prob.n(), prob.channels());
    let nn = n * n;
    let l1 = prob.mask().lambda1();
    let mut what = SpectrumTensor::zeros(n, c);
    for b in 0..nn {
        let energy: f64 = (0..c).map(|k| prob.xhat().channel(k)[b].norm_sqr()).sum();
        let scale: Complex64 = prob.yhat()[b] / (l1 + energy);
        for k in 0..c {
            let x = prob.xhat().channel(k)[b];
            what.as_mut_slice()[k * nn + b] = x.conj() * scale;
        }
    }
    ifft2_channels(&what)
}

/// Minimizes `Λ` by conjugate gradients on its normal equations, using the
/// gradient as the Hessian oracle (`H·v = ∇Λ(v) − ∇Λ(0)`).
///
/// Stops when the gradient norm falls below `rel_tol·‖∇Λ(0)‖`.
pub fn minimize_cg(prob: &ProblemInstance, rel_tol: f64, max_iters: usize) -> Result<FeatureTensor> {
    let (n, c) = (prob.n(), prob.channels());
    let zero = FeatureTensor::zeros(n, c);
    let g0 = objective_gradient(&zero, prob)?;
    let b = g0.scaled(-1.0);
    let b_norm = b.norm();
    if b_norm == 0.0 {
        return Ok(zero);
    }
    let hess =
        |v: &FeatureTensor| -> Result<FeatureTensor> { Ok(objective_gradient(v, prob)?.lin_comb(1.0, &g0, -1.0)) };
    let mut x = zero;
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = r.norm_sqr();
    for _ in 0..max_iters {
        if rr.sqrt() <= rel_tol * b_norm {
            break;
        }
        let hp = hess(&p)?;
        let php: f64 = p.as_slice().iter().zip(hp.as_slice()).map(|(a, b)| a * b).sum();
        let step = rr / php;
        x = x.lin_comb(1.0, &p, step);
        r = r.lin_comb(1.0, &hp, -step);
        let rr_next = r.norm_sqr();
        p = r.lin_comb(1.0, &p, rr_next / rr);
        rr = rr_next;
    }
    Ok(x)
}
