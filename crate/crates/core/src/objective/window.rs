use std::f64::consts::PI;

/// Separable Hann window, row-major `n×n`: the outer product of
/// `0.5·(1 − cos(2πi/(n−1)))` with itself.
pub fn cosine_window(n: usize) -> Vec<f64> {
    assert!(n >= 2, "cosine window needs n >= 2");
    let hann: Vec<f64> = (0..n)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / (n - 1) as f64).cos()))
        .collect();
    let mut out = Vec::with_capacity(n * n);
    for a in &hann {
        for b in &hann {
            out.push(a * b);
        }
    }
    out
}
