//! Benchmarks, continuous-limit checks, tracking, and evaluation for
//! `dcf-admm`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;
mod eval;
mod ode_check;
mod svg;
mod synth_bench;
mod track;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "dcf-bench", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Iterations to tolerance of all three solvers on random problems.
    SynthBench(synth_bench::SynthBenchArgs),
    /// Deviation between solver iterates and their continuous limits.
    OdeCheck(ode_check::OdeCheckArgs),
    /// One-pass tracking of an image sequence.
    Track(track::TrackArgs),
    /// CLE, DP, OP, and AUC of result boxes against ground truth.
    Eval(eval::EvalArgs),
    /// Writes the synthetic moving-square sequence.
    MakeFixture(track::MakeFixtureArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::SynthBench(a) => synth_bench::run(a),
        Command::OdeCheck(a) => ode_check::run(a),
        Command::Track(a) => track::run(a),
        Command::Eval(a) => eval::run(a),
        Command::MakeFixture(a) => track::make_fixture(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dcf-bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
