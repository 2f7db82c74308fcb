use std::path::PathBuf;

use clap::{Args, ValueEnum};
use dcf_admm::dynamics::{compare_with_scale, ComparisonReport, GradientScale};
use dcf_admm::solver::{SolverConfig, Variant};
use dcf_admm::synth::SyntheticSpec;
use rayon::prelude::*;
use serde::Serialize;

use crate::common::{create_dir, thread_pool, write_json, write_text, CliError, CliResult};
use crate::svg::{LinePlot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScaleArg {
    /// Gradient coefficient 1/(2−α).
    Published,
    /// Gradient coefficient α.
    Alpha,
}

impl From<ScaleArg> for GradientScale {
    fn from(s: ScaleArg) -> Self {
        match s {
            ScaleArg::Published => GradientScale::InverseTwoMinusAlpha,
            ScaleArg::Alpha => GradientScale::Alpha,
        }
    }
}

#[derive(Debug, Args)]
pub struct OdeCheckArgs {
    /// Penalty values, increasing; repeat the flag or separate with commas.
    #[arg(long = "rho", value_delimiter = ',', required = true)]
    pub rhos: Vec<f64>,
    /// Variants to pair with their continuous systems (default: admm and ra-admm).
    #[arg(long = "variant")]
    pub variants: Vec<Variant>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    /// Continuous-time horizon for the accelerated pairing.
    #[arg(long, default_value_t = 3.0)]
    pub horizon_accelerated: f64,
    /// Continuous-time horizon for the first-order pairings.
    #[arg(long, default_value_t = 0.25)]
    pub horizon_first_order: f64,
    #[arg(long, value_enum, default_value_t = ScaleArg::Published)]
    pub scale: ScaleArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
struct ResolvedConfig {
    problem: SyntheticSpec,
    seed: u64,
    rhos: Vec<f64>,
    alpha: f64,
    r: f64,
    horizon_accelerated: f64,
    horizon_first_order: f64,
    scale: ScaleArg,
}

#[derive(Debug, Serialize)]
struct PairingResult {
    variant: Variant,
    deviations: Vec<f64>,
    /// `None` with fewer than two penalties.
    strictly_decreasing: Option<bool>,
    runs: Vec<ComparisonReport>,
}

#[derive(Debug, Serialize)]
struct Report {
    config: ResolvedConfig,
    pairings: Vec<PairingResult>,
}

/// The fixed small instance used for the comparison.
pub fn check_problem() -> SyntheticSpec {
    SyntheticSpec {
        n: 8,
        channels: 2,
        target: (4, 4),
        lambda1: 1.0,
        lambda2: 10.0,
        ..SyntheticSpec::default()
    }
}

pub fn run(args: &OdeCheckArgs) -> CliResult {
    if args.rhos.is_empty() {
        return Err(CliError::Usage("at least one --rho is required".into()));
    }
    if args.rhos.iter().any(|r| !(*r > 0.0)) || args.rhos.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Usage("--rho values must be positive and increasing".into()));
    }
    let variants = if args.variants.is_empty() {
        vec![Variant::Admm, Variant::RAAdmm]
    } else {
        args.variants.clone()
    };
    let base = SolverConfig::default();
    let alpha = args.alpha.unwrap_or(base.alpha);
    let r = args.r.unwrap_or(base.r);
    let spec = check_problem();
    let prob = spec.generate(args.seed)?;

    let jobs: Vec<(Variant, f64)> = variants
        .iter()
        .flat_map(|&v| args.rhos.iter().map(move |&rho| (v, rho)))
        .collect();
    let pool = thread_pool()?;
    let reports: Vec<ComparisonReport> = pool.install(|| {
        jobs.par_iter()
            .map(|&(variant, rho)| {
                let cfg = SolverConfig {
                    variant,
                    rho,
                    alpha,
                    r,
                    ..base.clone()
                };
                let horizon = if variant.is_accelerated() {
                    args.horizon_accelerated
                } else {
                    args.horizon_first_order
                };
                compare_with_scale(&prob, &cfg, horizon, None, args.scale.into())
            })
            .collect::<dcf_admm::Result<_>>()
    })?;

    let k = args.rhos.len();
    let pairings: Vec<PairingResult> = variants
        .iter()
        .zip(reports.chunks(k))
        .map(|(&variant, runs)| {
            let deviations: Vec<f64> = runs.iter().map(|r| r.max_deviation).collect();
            PairingResult {
                variant,
                strictly_decreasing: (k >= 2).then(|| deviations.windows(2).all(|w| w[1] < w[0])),
                deviations,
                runs: runs.to_vec(),
            }
        })
        .collect();

    create_dir(&args.out)?;
    let plot = LinePlot {
        title: "Iterate vs continuous-limit deviation".into(),
        x_label: "rho".into(),
        y_label: "sup deviation".into(),
        log_x: true,
        log_y: true,
        series: pairings
            .iter()
            .map(|p| Series {
                name: p.variant.name().into(),
                points: args.rhos.iter().copied().zip(p.deviations.iter().copied()).collect(),
            })
            .collect(),
    };
    write_text(&args.out.join("deviation.svg"), &plot.render())?;
    for p in &pairings {
        let devs: Vec<String> = p.deviations.iter().map(|d| format!("{d:.3e}")).collect();
        println!("{}: {}", p.variant, devs.join(" "));
    }
    let failed: Vec<String> = pairings
        .iter()
        .filter(|p| p.strictly_decreasing == Some(false))
        .map(|p| p.variant.name().to_string())
        .collect();
    let report = Report {
        config: ResolvedConfig {
            problem: spec,
            seed: args.seed,
            rhos: args.rhos.clone(),
            alpha,
            r,
            horizon_accelerated: args.horizon_accelerated,
            horizon_first_order: args.horizon_first_order,
            scale: args.scale,
        },
        pairings,
    };
    write_json(&args.out.join("report.json"), &report)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "deviation not strictly decreasing in rho for {}",
            failed.join(", ")
        )))
    }
}
