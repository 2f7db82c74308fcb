use std::fmt;
use std::fs;
use std::path::Path;

use clap::Args;
use dcf_admm::solver::{SolverConfig, Variant};
use dcf_admm::DcfError;
use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// A checked property failed; outputs were still written.
    Check(String),
    Lib(DcfError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Check(m) => write!(f, "check failed: {m}"),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<DcfError> for CliError {
    fn from(e: DcfError) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Check(_) => 3,
            CliError::Lib(_) => 1,
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// Solver overrides shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct SolverArgs {
    /// admm, r-admm, or ra-admm.
    #[arg(long)]
    pub variant: Option<Variant>,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Momentum parameter of ra-admm.
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
}

impl SolverArgs {
    pub fn apply(&self, cfg: &mut SolverConfig) {
        if let Some(v) = self.variant {
            cfg.variant = v;
        }
        if let Some(v) = self.rho {
            cfg.rho = v;
        }
        if let Some(v) = self.alpha {
            cfg.alpha = v;
        }
        if let Some(v) = self.r {
            cfg.r = v;
        }
        if let Some(v) = self.max_iters {
            cfg.max_iters = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| DcfError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn write_text(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| DcfError::io(path, e).into())
}

pub fn write_json(path: &Path, value: &impl Serialize) -> CliResult {
    let mut text = serde_json::to_string_pretty(value).map_err(DcfError::from)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn create_dir(path: &Path) -> CliResult {
    fs::create_dir_all(path).map_err(|e| DcfError::io(path, e).into())
}

/// Worker pool capped by `DCF_THREADS` when set.
pub fn thread_pool() -> CliResult<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("DCF_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::Usage(format!("DCF_THREADS must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))
}

pub fn median(values: &[usize]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable();
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2] as f64
    } else {
        (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
    }
}
