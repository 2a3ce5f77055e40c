use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by parameter validation, analysis and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Invalid(String),

    #[error("config {path}: line {line}: {msg}")]
    Config {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("fit window [{start}, {end}] holds {found} samples, need at least {needed}")]
    WindowTooShort {
        start: f64,
        end: f64,
        found: usize,
        needed: usize,
    },

    #[error(
        "no periodic attractor after {periods} drive periods (period-map distance {distance:e})"
    )]
    NoAttractor { periods: usize, distance: f64 },

    #[error("ensemble of {n_traj} trajectories over t_total={t_total} failed: {msg}")]
    Resources {
        n_traj: usize,
        t_total: f64,
        msg: String,
    },

    #[error("check failed: {0}")]
    Check(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Validation-class errors map to exit status 2, everything else to 3.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Invalid(_) | Error::Config { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
