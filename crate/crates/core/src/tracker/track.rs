use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::detect::{detect, Detection};
use super::features::{extract_features, FeatureSet};
use super::image::{crop_square, search_side, GrayImage};
use super::sequence::BoundingBox;
use crate::error::{DcfError, Result};
use crate::objective::{build_mask, correlation_spectrum, gaussian_label, ProblemInstance};
use crate::solver::{Solver, SolverConfig, SolverState};
use crate::spectral::{FeatureTensor, SpectrumTensor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrackerConfig {
    /// Search-window area over target area.
    pub area_ratio: f64,
    pub feature_set: FeatureSet,
    /// Pixels per feature cell, after resampling.
    pub cell_size: usize,
    /// Feature grid side; the search window is resampled to
    /// `grid·cell_size` pixels.
    pub grid: usize,
    /// Label width as a fraction of `sqrt(h·w)` of the target in cells.
    pub label_sigma_factor: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub solver: SolverConfig,
    /// Feature-model interpolation factor.
    pub model_lr: f64,
    /// Carry solver iterates across frames (momentum schedule restarted).
    pub warm_start: bool,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            area_ratio: 16.0,
            feature_set: FeatureSet::GrayGrad9,
            cell_size: 4,
            grid: 48,
            label_sigma_factor: 0.1,
            lambda1: 10.0,
            lambda2: 100.0,
            solver: SolverConfig::default(),
            model_lr: 0.0125,
            warm_start: true,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DcfError::InvalidParameter(m));
        if !(self.area_ratio >= 1.0) {
            return bad(format!("area_ratio must be >= 1, got {}", self.area_ratio));
        }
        if self.cell_size == 0 {
            return bad("cell_size must be >= 1".into());
        }
        if self.grid < 4 {
            return bad(format!("grid must be >= 4, got {}", self.grid));
        }
        if !(0.0..=1.0).contains(&self.model_lr) {
            return bad(format!("model_lr must be in [0,1], got {}", self.model_lr));
        }
        if !(self.label_sigma_factor > 0.0) {
            return bad("label_sigma_factor must be positive".into());
        }
        self.solver.validate()
    }
}

/// Per-sequence tracker state.
#[derive(Debug, Clone)]
pub struct TrackState {
    /// Target centre, 0-indexed pixels.
    pub center: (f64, f64),
    /// Target `(w, h)` in pixels; fixed after initialisation.
    pub target_size: (f64, f64),
    pub filter: FeatureTensor,
    pub model_features_hat: SpectrumTensor,
    pub warm: Option<SolverState>,
    /// Search-window side in source pixels.
    pub window_side: f64,
    /// Solver iterations spent on the latest frame.
    pub last_iterations: usize,
    pub total_iterations: usize,
    problem: ProblemInstance,
}

impl TrackState {
    pub fn bbox(&self) -> BoundingBox {
        BoundingBox::from_center(self.center, self.target_size)
    }

    /// Source pixels per feature cell.
    pub fn cell_pixels(&self) -> f64 {
        self.window_side / self.filter.n() as f64
    }

    pub fn problem(&self) -> &ProblemInstance {
        &self.problem
    }

    /// Features of the search window centred at `center`.
    pub fn features_at(&self, frame: &GrayImage, center: (f64, f64), cfg: &TrackerConfig) -> Result<FeatureTensor> {
        let patch = crop_square(frame, center, self.window_side, cfg.grid * cfg.cell_size)?;
        extract_features(&patch, cfg.feature_set, cfg.cell_size)
    }

    pub fn detect(&self, features: &FeatureTensor) -> Result<Detection> {
        detect(&self.filter, features)
    }
}

/// Learns the first filter from `bbox` on `frame`.
pub fn init(frame: &GrayImage, bbox: BoundingBox, cfg: &TrackerConfig) -> Result<TrackState> {
    cfg.validate()?;
    let target_size = (bbox.w, bbox.h);
    let window_side = search_side(target_size, cfg.area_ratio)?;
    let n = cfg.grid;
    let cells = |px: f64| ((px * n as f64 / window_side).round() as usize).clamp(1, n);
    let target_cells = (cells(bbox.h), cells(bbox.w));
    let sigma = cfg.label_sigma_factor * ((target_cells.0 * target_cells.1) as f64).sqrt();
    let center = clamp_center(bbox.center(), frame);

    let patch = crop_square(frame, center, window_side, n * cfg.cell_size)?;
    let x = extract_features(&patch, cfg.feature_set, cfg.cell_size)?;
    let problem = ProblemInstance::from_features(
        &x,
        gaussian_label(n, sigma)?,
        build_mask(n, target_cells, cfg.lambda1, cfg.lambda2)?,
        cfg.solver.rho,
    )?;
    let outcome = Solver::new(&problem, &cfg.solver, None)?.run()?;
    let iters = outcome.trace.len();
    Ok(TrackState {
        center,
        target_size,
        filter: outcome.w,
        model_features_hat: problem.xhat().clone(),
        warm: Some(outcome.state),
        window_side,
        last_iterations: iters,
        total_iterations: iters,
        problem,
    })
}

/// Locates the target in `frame`, then updates the model and filter there.
pub fn step(mut state: TrackState, frame: &GrayImage, cfg: &TrackerConfig) -> Result<(TrackState, BoundingBox)> {
    let z = state.features_at(frame, state.center, cfg)?;
    let d = state.detect(&z)?;
    let scale = state.cell_pixels();
    state.center = clamp_center(
        (
            state.center.0 + d.displacement.1 * scale,
            state.center.1 + d.displacement.0 * scale,
        ),
        frame,
    );

    let x = state.features_at(frame, state.center, cfg)?;
    let fresh = correlation_spectrum(&x)?;
    state.model_features_hat = state
        .model_features_hat
        .lin_comb(1.0 - cfg.model_lr, &fresh, cfg.model_lr);
    state.problem = state.problem.with_features(state.model_features_hat.clone())?;

    let init = if cfg.warm_start {
        state.warm.take().map(|mut s| {
            s.reset_schedule();
            s
        })
    } else {
        None
    };
    let outcome = Solver::new(&state.problem, &cfg.solver, init)?.run()?;
    state.last_iterations = outcome.trace.len();
    state.total_iterations += outcome.trace.len();
    state.filter = outcome.w;
    state.warm = Some(outcome.state);
    let bbox = state.bbox();
    Ok((state, bbox))
}

fn clamp_center(c: (f64, f64), frame: &GrayImage) -> (f64, f64) {
    (
        c.0.clamp(0.0, frame.width() as f64 - 1.0),
        c.1.clamp(0.0, frame.height() as f64 - 1.0),
    )
}

/// Boxes and timing of one one-pass run.
#[derive(Debug, Clone)]
pub struct TrackRun {
    pub boxes: Vec<BoundingBox>,
    /// Tracking time, excluding frame decoding.
    pub elapsed: Duration,
    pub solver_iterations: usize,
}

impl TrackRun {
    pub fn fps(&self) -> f64 {
        let s = self.elapsed.as_secs_f64();
        if s > 0.0 {
            self.boxes.len() as f64 / s
        } else {
            0.0
        }
    }
}

/// One-pass tracking: initialise on frame 0 from `init_box`, never reset.
/// The first output box is `init_box` itself.
pub fn track_frames(frames: &[GrayImage], init_box: BoundingBox, cfg: &TrackerConfig) -> Result<TrackRun> {
    let first = frames
        .first()
        .ok_or_else(|| DcfError::InvalidParameter("no frames to track".into()))?;
    let start = Instant::now();
    let mut state = init(first, init_box, cfg)?;
    let mut boxes = vec![init_box];
    for frame in &frames[1..] {
        let (next, bbox) = step(state, frame, cfg)?;
        state = next;
        boxes.push(bbox);
    }
    Ok(TrackRun {
        boxes,
        elapsed: start.elapsed(),
        solver_iterations: state.total_iterations,
    })
}
