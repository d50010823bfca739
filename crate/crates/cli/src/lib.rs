//! Library side of the `petz` command: configuration, Bloch-ball sampling,
//! contour extraction, the two parameter sweeps, artifact emission and the
//! self-check suite.

pub mod build;
pub mod config;
pub mod contour;
pub mod sampling;
pub mod sweep;
pub mod verify;

use std::path::PathBuf;

pub use config::{GridAxis, ReferenceMode, SweepConfig};
pub use sampling::{sample_bloch, SamplingMode};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] petz_core::Error),
    #[error("{0}")]
    Invariant(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("could not build worker pool: {0}")]
    Pool(String),
}

impl CliError {
    /// 0 ok, 1 invariant or computation failure, 2 bad configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Core(petz_core::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs `f` on a pool of `workers` threads (0 picks the machine default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}
