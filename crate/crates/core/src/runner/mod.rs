//! Config-driven pipelines behind the `ptdiff` command line: simulate,
//! validate, msd, fit, map-osp and kernels.

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub mod checks;
pub mod cli;
pub mod config;
pub mod simulate;
pub mod tools;

pub use checks::{run_validate, Check, ValidationReport};
pub use config::{load_config, RunConfig, ValidatedRun};
pub use simulate::{run_simulate, Summary};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::ChecksFailed(_) => 1,
            Self::Config { .. } => 2,
            Self::Numerical(_) | Self::Io { .. } => 3,
        }
    }

    pub(crate) fn numerical(e: impl std::fmt::Display) -> Self {
        Self::Numerical(e.to_string())
    }
}

/// Atomically writes one output file.
pub(crate) fn emit<F>(path: &Path, fill: F) -> Result<(), RunError>
where
    F: FnOnce(&mut dyn io::Write) -> io::Result<()>,
{
    let io_err = |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    };
    crate::output::write_atomic(path, fill).map_err(io_err)
}

/// Pretty JSON followed by a newline.
pub(crate) fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}
