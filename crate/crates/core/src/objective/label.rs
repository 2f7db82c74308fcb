use num_complex::Complex64;

use crate::error::{DcfError, Result};
use crate::spectral::{fft2_channels, FeatureTensor};

/// Desired correlation response `Y` and its orthonormal spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelMap {
    n: usize,
    sigma: f64,
    values: Vec<f64>,
    spectrum: Vec<Complex64>,
}

/// Gaussian label with its peak at the zero-shift bin `(0, 0)`, using
/// circular distances so the map wraps around the grid edges.
pub fn gaussian_label(n: usize, sigma: f64) -> Result<LabelMap> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(DcfError::InvalidParameter(format!(
            "label sigma must be positive, got {sigma}"
        )));
    }
    let circ = |i: usize| i.min(n - i) as f64;
    let denom = 2.0 * sigma * sigma;
    let y = FeatureTensor::from_fn(n, 1, |i, j, _| {
        let (di, dj) = (circ(i), circ(j));
        (-(di * di + dj * dj) / denom).exp()
    })?;
    let spectrum = fft2_channels(&y)?.as_slice().to_vec();
    Ok(LabelMap {
        n,
        sigma,
        values: y.into_vec(),
        spectrum,
    })
}

impl LabelMap {
    /// Wraps an arbitrary real label grid.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        let y = FeatureTensor::new(n, 1, values)?;
        let spectrum = fft2_channels(&y)?.as_slice().to_vec();
        Ok(LabelMap {
            n,
            sigma: f64::NAN,
            values: y.into_vec(),
            spectrum,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Gaussian width in cells; NaN for labels built from raw values.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }
}
