//! ADMM, relaxed ADMM, and relaxed-accelerated ADMM for the masked filter
//! problem.
//!
//! Every variant alternates an exact per-frequency-bin solve for the
//! spectrum `Û`, an optional relaxation, an exact per-cell solve for the
//! spatial filter `W`, and a multiplier update. The accelerated variant
//! additionally extrapolates `W` and the multiplier with momentum
//! `μ = l/(l+r)`.

mod config;
mod run;
mod state;
mod subproblem;
mod trace;

pub use config::{SolverConfig, Variant, WStepMode};
pub use run::{
    iterations_to_tol, iterations_to_tol_from, run_solver, run_solver_with_state, Solver, SolverOutcome, ITERATION_CAP,
};
pub use state::SolverState;
pub use subproblem::{relax_step, solve_u_subproblem, solve_w_subproblem, u_bin_gradient, w_cell_gradient};
pub use trace::{ConvergenceTrace, IterationRecord, TRACE_CSV_HEADER};
