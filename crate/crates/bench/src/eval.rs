use std::fs;
use std::path::PathBuf;

use clap::Args;
use dcf_admm::eval::{evaluate_sequence, EvalReport, EvalThresholds};
use dcf_admm::tracker::read_boxes;

use crate::common::{create_dir, write_json, write_text, CliError, CliResult};
use crate::svg::{LinePlot, Series};
use crate::track::{meta_path, TrackMeta};

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Result box files; paired in order with `--gt`.
    #[arg(long = "result", required = true)]
    pub results: Vec<PathBuf>,
    #[arg(long = "gt", required = true)]
    pub gts: Vec<PathBuf>,
    /// Output directory for the report, curves, and plots.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20.0)]
    pub dp_threshold: f64,
    /// Count a centre error equal to the threshold as a miss.
    #[arg(long)]
    pub dp_exclusive: bool,
    #[arg(long, default_value_t = 0.5)]
    pub op_threshold: f64,
    /// Count an overlap equal to the threshold as a hit.
    #[arg(long)]
    pub op_inclusive: bool,
}

pub fn run(args: &EvalArgs) -> CliResult {
    if args.results.len() != args.gts.len() {
        return Err(CliError::Usage(format!(
            "{} --result files but {} --gt files",
            args.results.len(),
            args.gts.len()
        )));
    }
    let th = EvalThresholds {
        distance_px: args.dp_threshold,
        distance_inclusive: !args.dp_exclusive,
        overlap: args.op_threshold,
        overlap_strict: !args.op_inclusive,
    };
    let mut sequences = Vec::new();
    for (res, gt) in args.results.iter().zip(&args.gts) {
        let name = res
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut m = evaluate_sequence(&name, &read_boxes(res)?, &read_boxes(gt)?, &th)?;
        let meta = meta_path(res);
        if let Ok(text) = fs::read_to_string(&meta) {
            if let Ok(meta) = serde_json::from_str::<TrackMeta>(&text) {
                m.fps = Some(meta.fps);
            }
        }
        sequences.push(m);
    }
    let report = EvalReport::new(th, sequences)?;

    create_dir(&args.out)?;
    write_json(&args.out.join("report.json"), &report)?;
    let success = report.success_csv();
    let precision = report.precision_csv();
    write_text(&args.out.join("success.csv"), &success)?;
    write_text(&args.out.join("precision.csv"), &precision)?;
    for (file, csv, title, x) in [
        ("success.svg", &success, "Success plot", "overlap threshold"),
        (
            "precision.svg",
            &precision,
            "Precision plot",
            "location error threshold (px)",
        ),
    ] {
        let points = csv
            .lines()
            .skip(1)
            .filter_map(|l| {
                let (a, b) = l.split_once(',')?;
                Some((a.parse().ok()?, b.parse().ok()?))
            })
            .collect();
        let plot = LinePlot {
            title: title.into(),
            x_label: x.into(),
            y_label: "fraction of frames".into(),
            series: vec![Series {
                name: "mean".into(),
                points,
            }],
            ..LinePlot::default()
        };
        write_text(&args.out.join(file), &plot.render())?;
    }
    let m = &report.mean;
    println!(
        "CLE {:.3} px  DP {:.4}  OP {:.4}  AUC {:.4}{}",
        m.cle,
        m.dp,
        m.op,
        m.auc,
        m.fps.map(|f| format!("  FPS {f:.1}")).unwrap_or_default()
    );
    Ok(())
}
