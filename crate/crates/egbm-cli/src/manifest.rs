//! Run manifests and atomic file output.
//!
//! Commands render every output in memory first and hand the lot to
//! [`RunOutputs`], which writes each file through a temp file in the target
//! directory followed by a rename, then writes the manifest last. The
//! manifest records the resolved configuration, the seed, the tool version,
//! and content digests of all inputs and outputs; it is the only place a
//! timestamp appears, so repeated runs stay byte-identical everywhere else.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;
use sha2::{Digest, Sha256};

use crate::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn digest_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path)
        .map_err(|err| CliError::Runtime(format!("{}: {err}", path.display())))?;
    Ok(sha256_hex(&bytes))
}

/// Write through a temp file in the same directory, then rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => dir,
        _ => Path::new("."),
    };
    let fail = |err: String| CliError::Runtime(format!("{}: {err}", path.display()));
    let mut tmp = tempfile::Builder::new()
        .prefix(".egbm.")
        .tempfile_in(parent)
        .map_err(|err| fail(err.to_string()))?;
    tmp.write_all(bytes).map_err(|err| fail(err.to_string()))?;
    tmp.persist(path).map_err(|err| fail(err.to_string()))?;
    Ok(())
}

pub fn pretty_json_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON value always serializes");
    text.push('\n');
    text.into_bytes()
}

/// `d.csv` gets its manifest at `d.csv.manifest.json`.
pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut name = primary
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    primary.with_file_name(name)
}

/// The rendered outputs of one command run, written files-first,
/// manifest-last.
pub struct RunOutputs {
    command: &'static str,
    seed: Option<u64>,
    config: serde_json::Value,
    inputs: BTreeMap<String, String>,
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl RunOutputs {
    pub fn new(command: &'static str, seed: Option<u64>, config: serde_json::Value) -> Self {
        RunOutputs {
            command,
            seed,
            config,
            inputs: BTreeMap::new(),
            files: Vec::new(),
        }
    }

    /// Record an input file's content digest.
    pub fn record_input(&mut self, path: &Path) -> Result<(), CliError> {
        let digest = digest_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn add_file(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.files.push((path, bytes));
    }

    pub fn add_json(&mut self, path: PathBuf, value: &serde_json::Value) {
        self.add_file(path, pretty_json_bytes(value));
    }

    pub fn write_all(self, manifest_at: &Path) -> Result<(), CliError> {
        let outputs: BTreeMap<String, String> = self
            .files
            .iter()
            .map(|(path, bytes)| (path.display().to_string(), sha256_hex(bytes)))
            .collect();
        for (path, bytes) in &self.files {
            write_atomic(path, bytes)?;
        }
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let manifest = json!({
            "tool": "egbm",
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "seed": self.seed,
            "config": self.config,
            "inputs": self.inputs,
            "outputs": outputs,
            "created_unix_seconds": created,
        });
        write_atomic(manifest_at, &pretty_json_bytes(&manifest))
    }
}
