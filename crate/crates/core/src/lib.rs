//! Spatially masked multi-channel discriminative correlation filters learned
//! with ADMM, relaxed ADMM, and relaxed-accelerated ADMM.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: `N×N×C` tensors and the orthonormal channel-wise DFT.
//! - [`objective`]: masks, labels, and the objective `Λ(W)` with its gradient.
//! - [`solver`]: the three ADMM-family optimizers and convergence traces.
//! - [`dynamics`]: the continuous-time limits of the optimizers and checks
//!   that iterates follow them.
//! - [`tracker`]: a frame-by-frame tracker built on the solvers.
//! - [`eval`]: one-pass-evaluation metrics (CLE, DP, OP, AUC).
//! - [`synth`]: deterministic synthetic problems for benchmarks and tests.
//!
//! # Quick start
//!
//! ```
//! use dcf_admm::synth::SyntheticSpec;
//! use dcf_admm::solver::{run_solver, SolverConfig, Variant};
//!
//! let prob = SyntheticSpec::default().generate(7).unwrap();
//! let cfg = SolverConfig::for_variant(Variant::RAAdmm);
//! let (filter, trace) = run_solver(&prob, &cfg, None).unwrap();
//! assert_eq!(filter.n(), prob.n());
//! assert!(trace.len() <= cfg.max_iters);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod eval;
mod numeric;
pub mod objective;
pub mod solver;
pub mod spectral;
pub mod synth;
pub mod tracker;

pub use error::{DcfError, Result};
pub use numeric::pairwise_sum;

// Compile and run the guide's code listings as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/objective.md")]
    mod objective {}
    #[doc = include_str!("../../../book/src/solvers.md")]
    mod solvers {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/tracking.md")]
    mod tracking {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
