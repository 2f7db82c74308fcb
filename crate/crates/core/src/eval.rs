//! One-pass-evaluation metrics.
//!
//! - CLE: Euclidean distance between box centres, pixels.
//! - DP: fraction of frames with CLE within the distance threshold
//!   (20 px, inclusive by default).
//! - OP: fraction of frames whose IoU exceeds the overlap threshold
//!   (0.5, strict by default).
//! - AUC: mean success rate over overlap thresholds `0, 0.05, …, 1`.
//!   Success at threshold `θ` counts IoU `> θ`, so a perfect track scores
//!   20/21.

use serde::{Deserialize, Serialize};

use crate::error::{DcfError, Result};
use crate::numeric::pairwise_sum;
use crate::tracker::BoundingBox;

pub const SUCCESS_CSV_HEADER: &str = "threshold,success_rate";
pub const PRECISION_CSV_HEADER: &str = "threshold,precision";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalThresholds {
    pub distance_px: f64,
    pub distance_inclusive: bool,
    pub overlap: f64,
    pub overlap_strict: bool,
}

impl Default for EvalThresholds {
    fn default() -> Self {
        Self {
            distance_px: 20.0,
            distance_inclusive: true,
            overlap: 0.5,
            overlap_strict: true,
        }
    }
}

pub fn center_error(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ca, cb) = (a.center(), b.center());
    (ca.0 - cb.0).hypot(ca.1 - cb.1)
}

/// Intersection over union of the continuous rectangles `[x, x+w)×[y, y+h)`.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let iw = (a.x + a.w).min(b.x + b.w) - a.x.max(b.x);
    let ih = (a.y + a.h).min(b.y + b.h) - a.y.max(b.y);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    inter / (a.area() + b.area() - inter)
}

/// Overlap thresholds `0:0.05:1`.
pub fn success_thresholds() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// Distance thresholds `0..=50` px.
pub fn precision_thresholds() -> Vec<f64> {
    (0..=50).map(f64::from).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceMetrics {
    pub name: String,
    pub frames: usize,
    pub cle: f64,
    pub dp: f64,
    pub op: f64,
    pub auc: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fps: Option<f64>,
    /// `(threshold, fraction)` with IoU above the threshold.
    pub success_curve: Vec<(f64, f64)>,
    /// `(threshold, fraction)` with CLE at most the threshold.
    pub precision_curve: Vec<(f64, f64)>,
}

fn fraction(values: &[f64], pass: impl Fn(f64) -> bool) -> f64 {
    values.iter().filter(|&&v| pass(v)).count() as f64 / values.len() as f64
}

pub fn evaluate_sequence(
    name: &str,
    result: &[BoundingBox],
    truth: &[BoundingBox],
    th: &EvalThresholds,
) -> Result<SequenceMetrics> {
    if result.len() != truth.len() {
        return Err(DcfError::Shape(format!(
            "{name}: {} result boxes vs {} ground-truth boxes",
            result.len(),
            truth.len()
        )));
    }
    if result.is_empty() {
        return Err(DcfError::Shape(format!("{name}: no boxes")));
    }
    let cle: Vec<f64> = result.iter().zip(truth).map(|(a, b)| center_error(a, b)).collect();
    let ov: Vec<f64> = result.iter().zip(truth).map(|(a, b)| iou(a, b)).collect();
    let dp = fraction(&cle, |e| {
        if th.distance_inclusive {
            e <= th.distance_px
        } else {
            e < th.distance_px
        }
    });
    let op = fraction(&ov, |o| {
        if th.overlap_strict {
            o > th.overlap
        } else {
            o >= th.overlap
        }
    });
    let success_curve: Vec<(f64, f64)> = success_thresholds()
        .into_iter()
        .map(|t| (t, fraction(&ov, |o| o > t)))
        .collect();
    let precision_curve = precision_thresholds()
        .into_iter()
        .map(|t| (t, fraction(&cle, |e| e <= t)))
        .collect();
    let auc = pairwise_sum(&success_curve.iter().map(|p| p.1).collect::<Vec<_>>()) / success_curve.len() as f64;
    Ok(SequenceMetrics {
        name: name.to_string(),
        frames: result.len(),
        cle: pairwise_sum(&cle) / cle.len() as f64,
        dp,
        op,
        auc,
        fps: None,
        success_curve,
        precision_curve,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub thresholds: EvalThresholds,
    pub sequences: Vec<SequenceMetrics>,
    /// Unweighted means over sequences.
    pub mean: MeanMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanMetrics {
    pub cle: f64,
    pub dp: f64,
    pub op: f64,
    pub auc: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fps: Option<f64>,
}

impl EvalReport {
    pub fn new(thresholds: EvalThresholds, sequences: Vec<SequenceMetrics>) -> Result<Self> {
        if sequences.is_empty() {
            return Err(DcfError::InvalidParameter("no sequences to report".into()));
        }
        let mean_of = |f: &dyn Fn(&SequenceMetrics) -> f64| {
            let mut v: Vec<f64> = sequences.iter().map(f).collect();
            // Sorted so the mean does not depend on sequence order.
            v.sort_by(f64::total_cmp);
            pairwise_sum(&v) / v.len() as f64
        };
        let fps = if sequences.iter().all(|s| s.fps.is_some()) {
            Some(mean_of(&|s| s.fps.unwrap_or(0.0)))
        } else {
            None
        };
        let mean = MeanMetrics {
            cle: mean_of(&|s| s.cle),
            dp: mean_of(&|s| s.dp),
            op: mean_of(&|s| s.op),
            auc: mean_of(&|s| s.auc),
            fps,
        };
        Ok(Self {
            thresholds,
            sequences,
            mean,
        })
    }

    /// Mean success curve across sequences.
    pub fn success_csv(&self) -> String {
        curve_csv(SUCCESS_CSV_HEADER, &self.sequences, |s| &s.success_curve)
    }

    /// Mean precision curve across sequences.
    pub fn precision_csv(&self) -> String {
        curve_csv(PRECISION_CSV_HEADER, &self.sequences, |s| &s.precision_curve)
    }
}

fn curve_csv(header: &str, seqs: &[SequenceMetrics], curve: impl Fn(&SequenceMetrics) -> &Vec<(f64, f64)>) -> String {
    let mut out = format!("{header}\n");
    let first = curve(&seqs[0]);
    for (i, &(t, _)) in first.iter().enumerate() {
        let mut v: Vec<f64> = seqs.iter().map(|s| curve(s)[i].1).collect();
        v.sort_by(f64::total_cmp);
        out.push_str(&format!("{t},{}\n", pairwise_sum(&v) / v.len() as f64));
    }
    out
}
