use num_complex::Complex64;

use crate::error::{DcfError, Result};
use crate::numeric::{pairwise_sum, sum_squares};

fn check_shape(n: usize, channels: usize, len: usize) -> Result<()> {
    if n < 2 {
        return Err(DcfError::Shape(format!("grid side must be at least 2, got {n}")));
    }
    if channels == 0 {
        return Err(DcfError::Shape("tensor needs at least one channel".into()));
    }
    if len != n * n * channels {
        return Err(DcfError::Shape(format!(
            "expected {} values for {n}x{n}x{channels}, got {len}",
            n * n * channels
        )));
    }
    Ok(())
}

/// Real-valued `N×N×C` feature stack (features `X` or filters `W`).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    n: usize,
    channels: usize,
    data: Vec<f64>,
}

impl FeatureTensor {
    pub fn new(n: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        check_shape(n, channels, data.len())?;
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(DcfError::NonFinite(format!("feature value at flat index {pos}")));
        }
        Ok(Self { n, channels, data })
    }

    pub fn zeros(n: usize, channels: usize) -> Self {
        assert!(n >= 2 && channels >= 1, "tensor shape {n}x{n}x{channels} is invalid");
        Self {
            n,
            channels,
            data: vec![0.0; n * n * channels],
        }
    }

    /// Builds a tensor by evaluating `f(i, j, k)` at every cell.
    pub fn from_fn(n: usize, channels: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(n * n * channels);
        for k in 0..channels {
            for i in 0..n {
                for j in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Self::new(n, channels, data)
    }

    /// Grid side `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn channel(&self, k: usize) -> &[f64] {
        let nn = self.n * self.n;
        &self.data[k * nn..(k + 1) * nn]
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    pub(crate) fn set(&mut self, i: usize, j: usize, k: usize, value: f64) {
        self.data[(k * self.n + i) * self.n + j] = value;
    }

    pub fn same_shape(&self, other: &FeatureTensor) -> bool {
        self.n == other.n && self.channels == other.channels
    }

    pub(crate) fn ensure_same_shape(&self, other: &FeatureTensor, what: &str) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(DcfError::Shape(format!(
                "{what}: {}x{}x{} vs {}x{}x{}",
                self.n, self.n, self.channels, other.n, other.n, other.channels
            )))
        }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &FeatureTensor, b: f64) -> FeatureTensor {
        assert!(self.same_shape(other), "lin_comb on mismatched shapes");
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        FeatureTensor { data, ..*self }
    }

    pub fn scaled(&self, a: f64) -> FeatureTensor {
        FeatureTensor {
            data: self.data.iter().map(|v| a * v).collect(),
            ..*self
        }
    }

    /// Multiplies every channel elementwise by the same `N×N` weight grid.
    pub fn weighted_by(&self, weights: &[f64]) -> FeatureTensor {
        let nn = self.n * self.n;
        assert_eq!(weights.len(), nn, "weight grid must be N×N");
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(idx, v)| v * weights[idx % nn])
            .collect();
        FeatureTensor { data, ..*self }
    }

    /// Squared Frobenius norm over all channels.
    pub fn norm_sqr(&self) -> f64 {
        sum_squares(&self.data)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn channel_norm_sqr(&self, k: usize) -> f64 {
        sum_squares(self.channel(k))
    }

    pub fn distance(&self, other: &FeatureTensor) -> f64 {
        crate::numeric::distance(&self.data, &other.data)
    }

    /// Circular shift by `(di, dj)` cells: output `(i, j)` reads input `(i - di, j - dj)`.
    pub fn circshift(&self, di: isize, dj: isize) -> FeatureTensor {
        let n = self.n as isize;
        let mut out = FeatureTensor::zeros(self.n, self.channels);
        for k in 0..self.channels {
            for i in 0..self.n {
                for j in 0..self.n {
                    let si = (i as isize - di).rem_euclid(n) as usize;
                    let sj = (j as isize - dj).rem_euclid(n) as usize;
                    out.set(i, j, k, self.get(si, sj, k));
                }
            }
        }
        out
    }
}

/// Complex `N×N×C` frequency-domain tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTensor {
    n: usize,
    channels: usize,
    data: Vec<Complex64>,
}

impl SpectrumTensor {
    pub fn new(n: usize, channels: usize, data: Vec<Complex64>) -> Result<Self> {
        check_shape(n, channels, data.len())?;
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(DcfError::NonFinite(format!("spectrum value at flat index {pos}")));
        }
        Ok(Self { n, channels, data })
    }

    pub fn zeros(n: usize, channels: usize) -> Self {
        assert!(n >= 2 && channels >= 1, "tensor shape {n}x{n}x{channels} is invalid");
        Self {
            n,
            channels,
            data: vec![Complex64::new(0.0, 0.0); n * n * channels],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn channel(&self, k: usize) -> &[Complex64] {
        let nn = self.n * self.n;
        &self.data[k * nn..(k + 1) * nn]
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    #[cfg(test)]
    pub(crate) fn set(&mut self, i: usize, j: usize, k: usize, value: Complex64) {
        self.data[(k * self.n + i) * self.n + j] = value;
    }

    pub fn same_shape(&self, other: &SpectrumTensor) -> bool {
        self.n == other.n && self.channels == other.channels
    }

    pub fn conj(&self) -> SpectrumTensor {
        SpectrumTensor {
            data: self.data.iter().map(|v| v.conj()).collect(),
            ..*self
        }
    }

    pub fn scaled(&self, a: f64) -> SpectrumTensor {
        SpectrumTensor {
            data: self.data.iter().map(|v| v * a).collect(),
            ..*self
        }
    }

    /// `a·self + b·other`.
    pub fn lin_comb(&self, a: f64, other: &SpectrumTensor, b: f64) -> SpectrumTensor {
        assert!(self.same_shape(other), "lin_comb on mismatched shapes");
        let data = self.data.iter().zip(&other.data).map(|(x, y)| x * a + y * b).collect();
        SpectrumTensor { data, ..*self }
    }

    /// Plain elementwise product `self ⊙ other`.
    pub fn mul_elementwise(&self, other: &SpectrumTensor) -> SpectrumTensor {
        assert!(self.same_shape(other), "product on mismatched shapes");
        let data = self.data.iter().zip(&other.data).map(|(x, y)| x * y).collect();
        SpectrumTensor { data, ..*self }
    }

    /// Conjugated elementwise product `conj(self) ⊙ other`.
    pub fn mul_conj(&self, other: &SpectrumTensor) -> SpectrumTensor {
        assert!(self.same_shape(other), "product on mismatched shapes");
        let data = self.data.iter().zip(&other.data).map(|(x, y)| x.conj() * y).collect();
        SpectrumTensor { data, ..*self }
    }

    /// Per-bin sum over channels, giving one `N×N` grid.
    pub fn sum_channels(&self) -> Vec<Complex64> {
        let nn = self.n * self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); nn];
        for k in 0..self.channels {
            for (acc, v) in out.iter_mut().zip(self.channel(k)) {
                *acc += v;
            }
        }
        out
    }

    pub fn norm_sqr(&self) -> f64 {
        let mags: Vec<f64> = self.data.iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&mags)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest deviation from `X(i,j) = conj(X(-i,-j))` over all bins and
    /// channels, relative to the tensor norm. Zero for spectra of real data.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for k in 0..self.channels {
            for i in 0..n {
                for j in 0..n {
                    let mirror = self.get((n - i) % n, (n - j) % n, k).conj();
                    worst = worst.max((self.get(i, j, k) - mirror).norm());
                }
            }
        }
        let scale = self.norm();
        if scale > 0.0 {
            worst / scale
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(FeatureTensor::new(1, 1, vec![0.0]).is_err());
        assert!(FeatureTensor::new(2, 0, vec![]).is_err());
        assert!(FeatureTensor::new(2, 1, vec![0.0; 3]).is_err());
        assert!(matches!(
            FeatureTensor::new(2, 1, vec![0.0, f64::NAN, 0.0, 0.0]),
            Err(DcfError::NonFinite(_))
        ));
        let bad = vec![Complex64::new(f64::INFINITY, 0.0); 4];
        assert!(SpectrumTensor::new(2, 1, bad).is_err());
    }

    #[test]
    fn layout_is_channel_outermost_row_major() {
        let t = FeatureTensor::from_fn(3, 2, |i, j, k| (100 * k + 10 * i + j) as f64).unwrap();
        assert_eq!(t.as_slice()[(3 + 2) * 3 + 1], 121.0);
        assert_eq!(t.get(2, 1, 1), 121.0);
        assert_eq!(t.channel(1)[0], 100.0);
    }

    #[test]
    fn circshift_moves_impulse() {
        let mut t = FeatureTensor::zeros(4, 1);
        t.set(0, 0, 0, 1.0);
        let s = t.circshift(1, -1);
        assert_eq!(s.get(1, 3, 0), 1.0);
        assert_eq!(s.norm_sqr(), 1.0);
    }
}
