use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the filter-learning library.
#[derive(Debug, Error)]
pub enum DcfError {
    #[error("invalid shape: {0}")]
    Shape(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("spectrum is not Hermitian: relative imaginary residue {residue:.3e} exceeds {limit:.1e}")]
    NotHermitian { residue: f64, limit: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver diverged at iteration {iteration}: objective {objective}")]
    Diverged {
        iteration: usize,
        objective: f64,
        trace: Box<crate::solver::ConvergenceTrace>,
    },

    #[error("integration blew up at t = {time}")]
    OdeBlowUp {
        time: f64,
        partial: Box<crate::dynamics::Trajectory>,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("image error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = DcfError> = std::result::Result<T, E>;

impl DcfError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        DcfError::Io {
            path: path.into(),
            source,
        }
    }
}
