//! Continuous-time limits of the optimizers.
//!
//! With step `ε` and `t = l·ε`, the accelerated solver follows
//! `(2−α)(Ẅ + (r/t)Ẇ) + ∇Λ(W) = 0` for `ε = 1/√ρ`, and the plain and
//! relaxed solvers follow the gradient flow `(2−α)Ẇ + ∇Λ(W) = 0` for
//! `ε = 1/ρ`. Eliminating the multiplier exactly replaces `1/(2−α)` by `α`
//! in both systems ([`GradientScale`]); the two coincide for plain ADMM and
//! agree to first order in `α − 1`. This module integrates both systems,
//! compares them against solver iterates, and checks the decay bounds the
//! systems imply.

mod compare;
mod ode;
mod rate;

pub use compare::{
    compare_iterates_to_ode, compare_iterates_to_ode_from, compare_iterates_to_system, compare_with_scale,
    iteration_time_step, ComparisonReport,
};
pub use ode::{integrate, ode_rhs, rk4_step, GradientFn, GradientScale, OdeKind, OdeState, OdeSystem, Trajectory};
pub use rate::{
    fit_decay_rate, reduced_rate_constant, scaled_suboptimality_bound, trajectory_csv, BoundCheck, RateFit,
    TRAJECTORY_CSV_HEADER, T_MIN,
};
