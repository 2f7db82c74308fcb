use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::Args;
use dcf_admm::objective::minimize_cg;
use dcf_admm::solver::{run_solver_with_state, ConvergenceTrace, SolverConfig, SolverState, Variant};
use dcf_admm::synth::SyntheticSpec;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::common::{
    create_dir, median, read_json, thread_pool, write_json, write_text, CliError, CliResult, SolverArgs,
};
use crate::svg::{LinePlot, Series};

#[derive(Debug, Args)]
pub struct SynthBenchArgs {
    /// JSON file with `problem` and `solver` sections; defaults apply to
    /// anything omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
    /// First seed; seeds are consecutive.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Start every variant at the stationary state of a reference minimizer.
    #[arg(long)]
    pub from_optimum: bool,
    /// Record wall-clock time per iteration in the traces.
    #[arg(long)]
    pub timing: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub problem: SyntheticSpec,
    /// Shared solver settings; `variant` is ignored.
    pub solver: SolverConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            problem: SyntheticSpec::default(),
            solver: SolverConfig {
                max_iters: 500,
                ..SolverConfig::default()
            },
        }
    }
}

#[derive(Debug, Serialize)]
struct VariantSummary {
    iterations: Vec<usize>,
    median_iterations: f64,
    converged: usize,
}

#[derive(Debug, Serialize)]
struct Summary {
    config: BenchConfig,
    seeds: Vec<u64>,
    from_optimum: bool,
    variants: BTreeMap<String, VariantSummary>,
    /// Fraction of seeds with `ra-admm ≤ admm` iterations.
    ra_admm_le_admm_fraction: f64,
    median_ordering_holds: bool,
}

struct SeedResult {
    seed: u64,
    traces: Vec<(Variant, ConvergenceTrace)>,
}

fn run_seed(cfg: &BenchConfig, seed: u64, from_optimum: bool) -> dcf_admm::Result<SeedResult> {
    let prob = cfg.problem.generate(seed)?;
    let init = if from_optimum {
        let w = minimize_cg(&prob, 1e-13, 10_000)?;
        Some(SolverState::stationary(&prob, &w, cfg.solver.rho)?)
    } else {
        None
    };
    let traces = Variant::ALL
        .iter()
        .map(|&variant| {
            let solver = SolverConfig {
                variant,
                ..cfg.solver.clone()
            };
            run_solver_with_state(&prob, &solver, init.as_ref()).map(|out| (variant, out.trace))
        })
        .collect::<dcf_admm::Result<_>>()?;
    Ok(SeedResult { seed, traces })
}

pub fn run(args: &SynthBenchArgs) -> CliResult {
    let mut cfg: BenchConfig = match &args.config {
        Some(p) => read_json(p)?,
        None => BenchConfig::default(),
    };
    args.solver.apply(&mut cfg.solver);
    if args.seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    // Validate once with a variant that checks every parameter.
    SolverConfig {
        variant: Variant::RAAdmm,
        ..cfg.solver.clone()
    }
    .validate()?;

    let traces_dir = args.out.join("traces");
    create_dir(&traces_dir)?;
    let seeds: Vec<u64> = (args.seed..args.seed + args.seeds).collect();
    let pool = thread_pool()?;
    let results: Vec<SeedResult> = pool.install(|| {
        seeds
            .par_iter()
            .map(|&s| run_seed(&cfg, s, args.from_optimum))
            .collect::<dcf_admm::Result<_>>()
    })?;

    let mut per_variant: BTreeMap<Variant, Vec<usize>> = BTreeMap::new();
    let mut converged: BTreeMap<Variant, usize> = BTreeMap::new();
    for r in &results {
        for (variant, trace) in &r.traces {
            write_text(
                &traces_dir.join(format!("seed{:04}_{}.csv", r.seed, variant.name())),
                &trace.to_csv(args.timing),
            )?;
            per_variant.entry(*variant).or_default().push(trace.len());
            *converged.entry(*variant).or_default() += trace.converged as usize;
        }
    }

    let med = |v: Variant| median(&per_variant[&v]);
    let ra = &per_variant[&Variant::RAAdmm];
    let admm = &per_variant[&Variant::Admm];
    let wins = ra.iter().zip(admm).filter(|(a, b)| a <= b).count();
    let summary = Summary {
        seeds: seeds.clone(),
        from_optimum: args.from_optimum,
        variants: per_variant
            .iter()
            .map(|(v, it)| {
                (
                    v.name().to_string(),
                    VariantSummary {
                        iterations: it.clone(),
                        median_iterations: median(it),
                        converged: converged[v],
                    },
                )
            })
            .collect(),
        ra_admm_le_admm_fraction: wins as f64 / seeds.len().max(1) as f64,
        median_ordering_holds: med(Variant::RAAdmm) <= med(Variant::RAdmm) && med(Variant::RAdmm) <= med(Variant::Admm),
        config: cfg,
    };
    write_json(&args.out.join("summary.json"), &summary)?;

    let counts = LinePlot {
        title: "Iterations to tolerance per seed".into(),
        x_label: "seed".into(),
        y_label: "iterations".into(),
        series: per_variant
            .iter()
            .map(|(v, it)| Series {
                name: v.name().into(),
                points: seeds.iter().zip(it).map(|(&s, &n)| (s as f64, n as f64)).collect(),
            })
            .collect(),
        ..LinePlot::default()
    };
    write_text(&args.out.join("iterations.svg"), &counts.render())?;

    if let Some(first) = results.first() {
        let best = first
            .traces
            .iter()
            .flat_map(|(_, t)| t.objectives())
            .fold(f64::INFINITY, f64::min);
        let decay = LinePlot {
            title: format!("Objective gap, seed {}", first.seed),
            x_label: "iteration".into(),
            y_label: "objective - best".into(),
            log_x: true,
            log_y: true,
            series: first
                .traces
                .iter()
                .map(|(v, t)| Series {
                    name: v.name().into(),
                    points: t.records.iter().map(|r| (r.iter as f64, r.objective - best)).collect(),
                })
                .collect(),
        };
        write_text(&args.out.join("trace.svg"), &decay.render())?;
    }

    println!(
        "median iterations: admm {} r-admm {} ra-admm {}; ra-admm <= admm on {wins}/{} seeds",
        med(Variant::Admm),
        med(Variant::RAdmm),
        med(Variant::RAAdmm),
        seeds.len()
    );
    Ok(())
}
