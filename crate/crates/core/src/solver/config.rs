use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{DcfError, Result};

/// Which member of the ADMM family to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "admm")]
    Admm,
    #[serde(rename = "r-admm")]
    RAdmm,
    #[serde(rename = "ra-admm")]
    RAAdmm,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Admm, Variant::RAdmm, Variant::RAAdmm];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Admm => "admm",
            Variant::RAdmm => "r-admm",
            Variant::RAAdmm => "ra-admm",
        }
    }

    pub fn is_accelerated(self) -> bool {
        self == Variant::RAAdmm
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = DcfError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "admm" => Ok(Variant::Admm),
            "r-admm" | "radmm" => Ok(Variant::RAdmm),
            "ra-admm" | "r-a-admm" | "raadmm" => Ok(Variant::RAAdmm),
            other => Err(DcfError::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

/// How the per-cell `W` sub-problem is solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WStepMode {
    /// Exact minimizer `w = ρ(v + τ′)/(2λ₁p² + ρ)`.
    #[default]
    Exact,
    /// The approximate mapping `(sqrt(1 + λ₂/λ₁) − p)·(ρv + τ′)/(2λ₁ + ρ)`,
    /// kept for side-by-side comparison.
    Approximate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub variant: Variant,
    pub rho: f64,
    pub alpha: f64,
    pub r: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub w_step: WStepMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            variant: Variant::RAAdmm,
            rho: 1.0,
            alpha: 1.10,
            r: 4.0,
            max_iters: 8,
            tol: 5e-7,
            w_step: WStepMode::Exact,
        }
    }
}

impl SolverConfig {
    /// Defaults with a different variant.
    pub fn for_variant(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    /// Relaxation actually applied: plain ADMM always uses `α = 1`.
    pub fn effective_alpha(&self) -> f64 {
        match self.variant {
            Variant::Admm => 1.0,
            _ => self.alpha,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(DcfError::InvalidParameter(msg));
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return bad(format!("rho must be positive, got {}", self.rho));
        }
        if !(self.tol >= 0.0) {
            return bad(format!("tol must be non-negative, got {}", self.tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        match self.variant {
            Variant::Admm => {}
            Variant::RAdmm | Variant::RAAdmm => {
                if !(self.alpha > 0.0 && self.alpha < 2.0) || self.alpha == 1.0 {
                    return bad(format!(
                        "{} needs alpha in (0,1)∪(1,2), got {}",
                        self.variant, self.alpha
                    ));
                }
            }
        }
        if self.variant == Variant::RAAdmm && !(self.r >= 3.0 && self.r.is_finite()) {
            return bad(format!("damping constant r must be >= 3, got {}", self.r));
        }
        Ok(())
    }
}
