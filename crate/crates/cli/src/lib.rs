//! Command-line front end and acceptance harness for `cfl-core`.

pub mod canonical;
pub mod commands;
pub mod corpus;
pub mod oracle;
pub mod suite;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use cfl_core::ErrorKind;
use thiserror::Error;

pub use canonical::{to_canonical_json, CanonicalError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_AUDIT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cfl_core::Error),
    #[error("{0}")]
    Input(String),
    #[error("cannot serialize output: {0}")]
    Serialize(#[from] CanonicalError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::Resource | ErrorKind::Numerical | ErrorKind::Invariant => EXIT_RESOURCE,
            },
            CliError::Input(_) | CliError::Io { .. } => EXIT_INPUT,
            CliError::Serialize(_) => EXIT_RESOURCE,
        }
    }
}

/// Writes via a sibling temporary file and a rename, so readers never see a
/// half-written file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Caps rayon's global pool at `CFL_THREADS` workers when the variable is set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CFL_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&k| k > 0)
        .ok_or_else(|| CliError::Input(format!("CFL_THREADS must be a positive integer, got `{raw}`")))?;
    // a second call within one process (tests) finds the pool already built
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
