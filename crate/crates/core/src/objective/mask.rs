use crate::error::{DcfError, Result};

/// Target/background indicator `B` and the fused penalty grid `P`.
///
/// `P = sqrt(1 + (λ₂/λ₁)·B)` elementwise, so that
/// `λ₁‖W⊙P‖² = λ₁‖W‖² + λ₂‖W⊙B‖²` for every `W`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskPair {
    n: usize,
    target: (usize, usize),
    lambda1: f64,
    lambda2: f64,
    indicator: Vec<f64>,
    penalty: Vec<f64>,
}

/// Builds a centered rectangular target region of `target = (height, width)`
/// cells on an `n×n` grid. When `n - dim` is odd the extra row/column goes to
/// the bottom/right, i.e. the region leans toward the top-left.
pub fn build_mask(n: usize, target: (usize, usize), lambda1: f64, lambda2: f64) -> Result<MaskPair> {
    let (th, tw) = target;
    if th == 0 || tw == 0 || th > n || tw > n {
        return Err(DcfError::InvalidParameter(format!(
            "target {th}x{tw} does not fit in a {n}x{n} grid"
        )));
    }
    if !(lambda1 > 0.0 && lambda1.is_finite()) {
        return Err(DcfError::InvalidParameter(format!(
            "lambda1 must be positive, got {lambda1}"
        )));
    }
    if !(lambda2 >= 0.0 && lambda2.is_finite()) {
        return Err(DcfError::InvalidParameter(format!(
            "lambda2 must be non-negative, got {lambda2}"
        )));
    }
    let r0 = (n - th) / 2;
    let c0 = (n - tw) / 2;
    let background = (1.0 + lambda2 / lambda1).sqrt();
    let mut indicator = vec![1.0; n * n];
    let mut penalty = vec![background; n * n];
    for i in r0..r0 + th {
        for j in c0..c0 + tw {
            indicator[i * n + j] = 0.0;
            penalty[i * n + j] = 1.0;
        }
    }
    Ok(MaskPair {
        n,
        target,
        lambda1,
        lambda2,
        indicator,
        penalty,
    })
}

impl MaskPair {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Target region size `(height, width)` in cells.
    pub fn target(&self) -> (usize, usize) {
        self.target
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// `B`, row-major `N×N`: 0 on the target, 1 on the background.
    pub fn indicator(&self) -> &[f64] {
        &self.indicator
    }

    /// `P`, row-major `N×N`.
    pub fn penalty(&self) -> &[f64] {
        &self.penalty
    }

    /// Background cell count.
    pub fn background_cells(&self) -> usize {
        self.indicator.iter().filter(|b| **b == 1.0).count()
    }
}
