use std::path::{Path, PathBuf};

use clap::Args;
use dcf_admm::tracker::{track_frames, write_boxes, BoundingBox, FixtureSpec, Sequence, TrackerConfig};
use serde::{Deserialize, Serialize};

use crate::common::{read_json, write_json, CliError, CliResult, SolverArgs};

#[derive(Debug, Args)]
pub struct TrackArgs {
    /// Sequence directory (`img/NNNN.{jpg,png}`, optional `groundtruth_rect.txt`).
    #[arg(long)]
    pub seq: PathBuf,
    /// Initial box `x,y,w,h` (1-indexed); defaults to the first ground-truth box.
    #[arg(long)]
    pub init: Option<BoundingBox>,
    /// TrackerConfig JSON; defaults apply to anything omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Box file to write; a `.json` sidecar with timing is written next to it.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

/// Sidecar written next to a result box file.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrackMeta {
    pub config: TrackerConfig,
    pub sequence: String,
    pub frames: usize,
    pub fps: f64,
    pub solver_iterations: usize,
}

pub fn meta_path(boxes: &Path) -> PathBuf {
    boxes.with_extension("json")
}

pub fn run(args: &TrackArgs) -> CliResult {
    let mut cfg: TrackerConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => TrackerConfig::default(),
    };
    args.solver.apply(&mut cfg.solver);
    cfg.validate()?;

    let seq = Sequence::open(&args.seq)?;
    let init = match args.init {
        Some(b) => b,
        None => *seq
            .groundtruth()?
            .first()
            .ok_or_else(|| CliError::Usage(format!("{}: empty ground truth and no --init", seq.name)))?,
    };
    let frames = seq.load_frames()?;
    let run = track_frames(&frames, init, &cfg)?;
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        crate::common::create_dir(dir)?;
    }
    write_boxes(&args.out, &run.boxes)?;
    let meta = TrackMeta {
        config: cfg,
        sequence: seq.name.clone(),
        frames: run.boxes.len(),
        fps: run.fps(),
        solver_iterations: run.solver_iterations,
    };
    write_json(&meta_path(&args.out), &meta)?;
    println!(
        "{}: {} frames, {:.1} fps, {} solver iterations",
        seq.name, meta.frames, meta.fps, meta.solver_iterations
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct MakeFixtureArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub frames: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
}

pub fn make_fixture(args: &MakeFixtureArgs) -> CliResult {
    let spec = FixtureSpec {
        frames: args.frames,
        seed: args.seed,
        ..FixtureSpec::default()
    };
    spec.write(&args.out)?;
    println!("wrote {} frames to {}", spec.frames, args.out.display());
    Ok(())
}
