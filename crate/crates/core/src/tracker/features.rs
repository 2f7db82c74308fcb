use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::image::GrayImage;
use crate::error::{DcfError, Result};
use crate::objective::cosine_window;
use crate::spectral::FeatureTensor;

pub const ORIENTATION_BINS: usize = 9;
const NORM_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureSet {
    Gray,
    #[default]
    #[serde(rename = "gray+grad9")]
    GrayGrad9,
}

impl FeatureSet {
    pub fn channels(self) -> usize {
        match self {
            FeatureSet::Gray => 1,
            FeatureSet::GrayGrad9 => 1 + ORIENTATION_BINS,
        }
    }
}

/// Per-cell features of a square patch, cosine-windowed on every channel.
///
/// Channel 0 is the mean of `intensity/255 − 0.5` over the cell. With
/// [`FeatureSet::GrayGrad9`], channels 1..=9 hold an unsigned orientation
/// histogram with bins centred at `k·20°`, L2-normalised per cell.
pub fn extract_features(patch: &GrayImage, set: FeatureSet, cell_size: usize) -> Result<FeatureTensor> {
    let raw = extract_raw(patch, set, cell_size)?;
    Ok(raw.weighted_by(&cosine_window(raw.n())))
}

/// As [`extract_features`] without the cosine window.
pub fn extract_raw(patch: &GrayImage, set: FeatureSet, cell_size: usize) -> Result<FeatureTensor> {
    let side = patch.width();
    if patch.height() != side {
        return Err(DcfError::Shape(format!(
            "patch must be square, got {}x{}",
            side,
            patch.height()
        )));
    }
    if cell_size == 0 || !side.is_multiple_of(cell_size) {
        return Err(DcfError::Shape(format!(
            "patch side {side} not divisible by cell size {cell_size}"
        )));
    }
    let n = side / cell_size;
    let c = set.channels();
    let mut out = vec![0.0; n * n * c];
    let area = (cell_size * cell_size) as f64;

    for y in 0..side {
        for x in 0..side {
            let cell = (y / cell_size) * n + x / cell_size;
            out[cell] += (patch.get(x, y) / 255.0 - 0.5) / area;
        }
    }

    if set == FeatureSet::GrayGrad9 {
        let plane = n * n;
        let bin_width = PI / ORIENTATION_BINS as f64;
        for y in 0..side {
            for x in 0..side {
                let (xi, yi) = (x as isize, y as isize);
                let gx = (patch.get_clamped(xi + 1, yi) - patch.get_clamped(xi - 1, yi)) / 2.0;
                let gy = (patch.get_clamped(xi, yi + 1) - patch.get_clamped(xi, yi - 1)) / 2.0;
                let mag = gx.hypot(gy);
                if mag == 0.0 {
                    continue;
                }
                let theta = gy.atan2(gx).rem_euclid(PI);
                let pos = theta / bin_width;
                let lo = pos.floor();
                let frac = pos - lo;
                let lo = lo as usize % ORIENTATION_BINS;
                let hi = (lo + 1) % ORIENTATION_BINS;
                let cell = (y / cell_size) * n + x / cell_size;
                out[(1 + lo) * plane + cell] += mag * (1.0 - frac);
                out[(1 + hi) * plane + cell] += mag * frac;
            }
        }
        for cell in 0..plane {
            let norm = (1..c).map(|k| out[k * plane + cell].powi(2)).sum::<f64>().sqrt();
            for k in 1..c {
                out[k * plane + cell] /= norm + NORM_EPS;
            }
        }
    }
    FeatureTensor::new(n, c, out)
}
