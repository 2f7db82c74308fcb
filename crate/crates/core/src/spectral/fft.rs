use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::tensor::{FeatureTensor, SpectrumTensor};
use crate::error::{DcfError, Result};

/// Relative imaginary residue above which an inverse transform is rejected.
///
/// A real-signal spectrum round-trips with residue near machine epsilon, so
/// anything this large means Hermitian symmetry was broken upstream.
pub const IMAG_RESIDUE_LIMIT: f64 = 1e-6;

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch_len: usize,
}

type PlanCache = (FftPlanner<f64>, HashMap<usize, Arc<Plans>>);

thread_local! {
    static PLANS: RefCell<PlanCache> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans_for(n: usize) -> Arc<Plans> {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        if let Some(p) = cache.get(&n) {
            return Arc::clone(p);
        }
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        let plans = Arc::new(Plans {
            forward,
            inverse,
            scratch_len,
        });
        cache.insert(n, Arc::clone(&plans));
        plans
    })
}

fn transpose_in_place(block: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            block.swap(i * n + j, j * n + i);
        }
    }
}

/// 2-D transform of every `N×N` channel block in `data`, scaled by `1/N`.
fn transform_blocks(data: &mut [Complex64], n: usize, inverse: bool) {
    let plans = plans_for(n);
    let fft = if inverse { &plans.inverse } else { &plans.forward };
    let mut scratch = vec![Complex64::new(0.0, 0.0); plans.scratch_len];
    let scale = 1.0 / n as f64;
    for block in data.chunks_exact_mut(n * n) {
        // Rows, then columns via transposition.
        fft.process_with_scratch(block, &mut scratch);
        transpose_in_place(block, n);
        fft.process_with_scratch(block, &mut scratch);
        transpose_in_place(block, n);
        for v in block.iter_mut() {
            *v *= scale;
        }
    }
}

/// Orthonormal forward DFT of each channel.
pub fn fft2_channels(x: &FeatureTensor) -> Result<SpectrumTensor> {
    if x.is_empty() {
        return Err(DcfError::Shape("cannot transform an empty tensor".into()));
    }
    let n = x.n();
    let mut out = SpectrumTensor::zeros(n, x.channels());
    for (dst, src) in out.as_mut_slice().iter_mut().zip(x.as_slice()) {
        *dst = Complex64::new(*src, 0.0);
    }
    transform_blocks(out.as_mut_slice(), n, false);
    Ok(out)
}

/// Orthonormal forward DFT of complex data, no symmetry assumptions.
pub fn fft2_complex(u: &SpectrumTensor) -> SpectrumTensor {
    let mut out = u.clone();
    transform_blocks(out.as_mut_slice(), u.n(), false);
    out
}

/// Orthonormal inverse DFT of complex data, keeping the complex result.
pub fn ifft2_complex(u: &SpectrumTensor) -> SpectrumTensor {
    let mut out = u.clone();
    transform_blocks(out.as_mut_slice(), u.n(), true);
    out
}

/// Orthonormal inverse DFT of each channel back to a real tensor.
///
/// The imaginary part of the result is discarded when its norm is within
/// [`IMAG_RESIDUE_LIMIT`] of the input norm; otherwise the spectrum cannot
/// have come from real data and [`DcfError::NotHermitian`] is returned.
pub fn ifft2_channels(u: &SpectrumTensor) -> Result<FeatureTensor> {
    let full = ifft2_complex(u);
    let total = u.norm_sqr();
    let imag: f64 = crate::numeric::sum_squares(&full.as_slice().iter().map(|v| v.im).collect::<Vec<_>>());
    if total > 0.0 {
        let residue = (imag / total).sqrt();
        if residue > IMAG_RESIDUE_LIMIT {
            return Err(DcfError::NotHermitian {
                residue,
                limit: IMAG_RESIDUE_LIMIT,
            });
        }
    }
    let data = full.as_slice().iter().map(|v| v.re).collect();
    FeatureTensor::new(u.n(), u.channels(), data)
}
