use std::fs;
use std::path::{Path, PathBuf};

use mubcert::photonics::InterferometerConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Provenance record written next to every output.
///
/// `argv` is complete: it contains the seed actually used, so running it
/// again through `mubcert replay` reproduces the outputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub config: Option<InterferometerConfig>,
    pub seed: Option<u64>,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
    /// Command-specific results such as a calibrated noise sigma.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

pub fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn new(command: &str, argv: Vec<String>, started_at: String) -> Self {
        Self {
            command: command.to_string(),
            argv,
            config: None,
            seed: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            started_at,
            finished_at: String::new(),
            details: serde_json::Value::Null,
        }
    }

    pub fn write(mut self, path: &Path) -> Result<()> {
        self.finished_at = now();
        let text = serde_json::to_string_pretty(&self).expect("serializable");
        fs::write(path, text + "\n").map_err(CliError::io(path))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(CliError::io(path))?;
        serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
    }
}

/// `<path>.manifest.json`.
pub fn default_path(primary: &Path) -> PathBuf {
    let mut name = primary.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}
