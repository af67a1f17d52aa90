//! File formats, rendering and the command line around `parthier-core`.
//!
//! Artifacts written here are deterministic: the same inputs, configuration
//! and seeds give byte-identical files.
//!
//! | artifact | writer | reader |
//! |---|---|---|
//! | field (`.bin` + `.json` sidecar) | [`field_io::write_field`] | [`field_io::read_field`] |
//! | part tree JSON | [`artifacts::TreeDoc`] | [`artifacts::read_tree`] |
//! | sampled tree JSON | [`artifacts::SampleDoc`] | [`artifacts::SampleDoc::to_sample`] |
//! | matching JSON | [`artifacts::MatchDoc`] | serde |
//! | PNG renders | [`render`] | |

pub mod artifacts;
pub mod cli;
pub mod config;
pub mod error;
pub mod field_io;
pub mod render;
pub mod shape;

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

pub use error::{Error, Result};

/// Environment variable naming the default output directory.
pub const CACHE_DIR_VAR: &str = "PARTHIER_CACHE_DIR";

/// Where commands write when no output path is given: `$PARTHIER_CACHE_DIR`
/// if set, else the working directory.
pub fn output_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_VAR).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.into(), source })?;
    }
    std::fs::write(path, bytes).map_err(|source| Error::Io { path: path.into(), source })
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::invalid(path, e.to_string()))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::invalid(path, format!("invalid document: {e}")))
}
