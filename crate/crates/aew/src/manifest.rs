//! Run manifests: the reproducibility record written beside every output.
//!
//! A manifest stores everything needed to repeat a run: the subcommand,
//! the fully resolved configuration (inlined, so the original config file
//! is not needed), the effective seed, the tool version, and the paths of
//! input and output files. Re-running from a manifest reproduces the
//! output bytes exactly on one platform; only the recorded wall-clock
//! duration differs between a run and its rerun.
//!
//! All file writes here are atomic: content goes to a temporary file in
//! the destination directory and is renamed into place, so a crash or a
//! concurrent reader never sees a half-written output.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{check_schema_version, load_json, SCHEMA_VERSION};
use crate::error::{Error, Result};

/// Reproducibility record for one CLI run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub schema_version: u32,
    /// Version of the binary that produced the outputs.
    pub tool_version: String,
    pub subcommand: String,
    /// Seed the run actually used; absent for deterministic subcommands.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// The fully resolved configuration, inlined.
    pub config: serde_json::Value,
    /// Files the run read. Reruns read them again from these paths.
    pub inputs: Vec<PathBuf>,
    /// Files the run wrote, manifest excluded. The first entry anchors the
    /// manifest's own path.
    pub outputs: Vec<PathBuf>,
    /// Informational; ignored when re-running.
    pub duration_seconds: f64,
}

impl RunManifest {
    pub fn new(
        subcommand: impl Into<String>,
        config: serde_json::Value,
        seed: Option<u64>,
    ) -> RunManifest {
        RunManifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.into(),
            seed,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
            duration_seconds: 0.0,
        }
    }

    /// Where the manifest for a given output file lives: the output path
    /// with ".manifest.json" appended (so "d.csv" pairs with
    /// "d.csv.manifest.json").
    pub fn path_for(output: &Path) -> Result<PathBuf> {
        let name = output
            .file_name()
            .ok_or_else(|| Error::Config(format!("{} has no file name", output.display())))?;
        let mut name = name.to_os_string();
        name.push(".manifest.json");
        Ok(output.with_file_name(name))
    }

    /// Writes the manifest beside its first output, atomically.
    pub fn save(&self) -> Result<PathBuf> {
        let anchor = self
            .outputs
            .first()
            .ok_or_else(|| Error::Config("manifest has no outputs to sit beside".into()))?;
        let path = RunManifest::path_for(anchor)?;
        write_atomic(&path, &to_json_bytes(self)?)?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<RunManifest> {
        let manifest: RunManifest = load_json(path)?;
        check_schema_version(manifest.schema_version)?;
        Ok(manifest)
    }
}

/// Serializes a report or config as pretty JSON with a trailing newline,
/// the format of every JSON file this crate writes.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Writes bytes to a temporary file in the destination directory and
/// renames it over the target path.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}
