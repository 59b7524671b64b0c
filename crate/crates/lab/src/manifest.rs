//! Sidecar manifests recording how each CSV artifact was produced.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// The subcommand's full argument set.
    pub parameters: serde_json::Value,
    /// Worker threads actually used, after resolving `auto`.
    pub workers_resolved: Option<usize>,
    pub tool_version: String,
    pub timestamp_unix: u64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value, outputs: Vec<PathBuf>) -> Self {
        Self {
            command: command.into(),
            parameters,
            workers_resolved: None,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            timestamp_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            outputs,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), LabError> {
        let json = serde_json::to_string_pretty(self).expect("manifest serialises");
        std::fs::write(path, json + "\n").map_err(|e| LabError::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| LabError::input(path, format!("bad manifest: {e}")))
    }
}

/// `results.csv` → `results.csv.manifest.json`.
pub fn manifest_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
