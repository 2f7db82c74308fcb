use std::fmt::Write as _;

/// Header of the trace CSV export.
pub const TRACE_CSV_HEADER: &str = "iter,objective,primal_residual,dual_residual,elapsed_ms";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// Iteration index `l` after the step (first step is 1).
    pub iter: usize,
    /// `Λ(W[l])`.
    pub objective: f64,
    /// `‖F⁻¹(V̂) − W[l]‖_F`.
    pub primal_residual: f64,
    /// `ρ‖W[l] − W[l−1]‖_F`.
    pub dual_residual: f64,
    /// Wall time since the solver started.
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    /// `Λ(W[0])` of the starting point.
    pub initial_objective: f64,
    pub records: Vec<IterationRecord>,
    /// Whether the stopping criterion fired (as opposed to the iteration cap).
    pub converged: bool,
}

impl ConvergenceTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last_objective(&self) -> f64 {
        self.records.last().map_or(self.initial_objective, |r| r.objective)
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    /// CSV with [`TRACE_CSV_HEADER`]. With `timing = false` the elapsed
    /// column is written as zero, making the file reproducible byte for byte.
    pub fn to_csv(&self, timing: bool) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let elapsed = if timing { r.elapsed_ms } else { 0.0 };
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{:.6}",
                r.iter, r.objective, r.primal_residual, r.dual_residual, elapsed
            );
        }
        out
    }
}
