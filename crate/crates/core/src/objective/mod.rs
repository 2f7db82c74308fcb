//! The masked filter-learning problem: masks, labels, window, and the
//! objective `Λ(W)` with its gradient.

mod label;
mod mask;
mod problem;
mod reference;
mod window;

pub use label::{gaussian_label, LabelMap};
pub use mask::{build_mask, MaskPair};
pub use problem::{correlation_spectrum, evaluate_objective, objective_gradient, ProblemInstance, ProblemSidecar};
pub use reference::{minimize_cg, ridge_solution};
pub use window::cosine_window;
