//! The run manifest: a JSON snapshot of the fully resolved configuration,
//! grids, outputs and derivations, written alongside every command's
//! output. Re-running the recorded command with the recorded config
//! reproduces the data files byte for byte (the manifest itself carries
//! the wall-clock timestamp).

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;

use crate::config::ConfigDoc;
use crate::error::CliResult;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp_unix_s: u64,
    pub command: String,
    pub args: serde_json::Value,
    /// Fully resolved configuration; feeding it back through `--config`
    /// with the same command line reproduces the outputs.
    pub config: ConfigDoc,
    pub mode_window: serde_json::Value,
    pub grids: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<String>,
    pub notes: BTreeMap<String, serde_json::Value>,
    pub warnings: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, args: serde_json::Value, config: ConfigDoc) -> Self {
        let timestamp_unix_s = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            tool: "wgspec",
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix_s,
            command: command.to_string(),
            args,
            config,
            mode_window: serde_json::Value::Null,
            grids: BTreeMap::new(),
            outputs: Vec::new(),
            notes: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn set_mode_window(&mut self, grid: &wgspec_core::dispersion::ModeGrid) {
        self.mode_window = serde_json::json!({
            "spacing_per_m": grid.spacing(),
            "center_n": grid.center_n(),
            "n_max": grid.n_max(),
            "modes": grid.len(),
        });
    }

    pub fn note(&mut self, key: &str, value: serde_json::Value) {
        self.notes.insert(key.to_string(), value);
    }

    pub fn record_output(&mut self, path: &Path) {
        if let Some(name) = path.file_name() {
            self.outputs.push(name.to_string_lossy().into_owned());
        }
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text)?;
        Ok(())
    }
}
