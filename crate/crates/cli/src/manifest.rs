use std::path::{Path, PathBuf};

use brlab::io::CSV_DIGITS;
use brlab::{Error, Result};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::alpha::Mode;

/// Everything needed to repeat a run. Written as `manifest.json` in the
/// run directory whether the run succeeds or not.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub parameters: Map<String, Value>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub precision_bits: u32,
    pub csv_digits: usize,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub outputs: Vec<String>,
    pub status: String,
    pub error: Option<String>,
}

/// Per-run state shared by every subcommand.
pub struct Run {
    pub dir: PathBuf,
    pub manifest: RunManifest,
}

fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

impl Run {
    pub fn new(out_dir: &Path, command: &str, argv: Vec<String>) -> Self {
        let dir = out_dir.join(command.replace(' ', "-"));
        let manifest = RunManifest {
            command: command.into(),
            argv,
            parameters: Map::new(),
            mode: None,
            seed: None,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            precision_bits: brlab::contfrac::precision_bits_from_env()
                .unwrap_or(brlab::contfrac::DEFAULT_PRECISION_BITS),
            csv_digits: CSV_DIGITS,
            started_at: now(),
            finished_at: None,
            outputs: Vec::new(),
            status: "running".into(),
            error: None,
        };
        Run { dir, manifest }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.manifest.parameters.insert(
            key.into(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn mode(&mut self, mode: Mode) {
        self.manifest.mode = Some(mode);
    }

    /// Path for an artifact inside the run directory, recorded as output.
    pub fn output(&mut self, name: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(name);
        self.manifest.outputs.push(path.display().to_string());
        Ok(path)
    }

    pub fn record_output(&mut self, path: &str) {
        if !self.manifest.outputs.iter().any(|p| p == path) {
            self.manifest.outputs.push(path.into());
        }
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf> {
        let path = self.output(name)?;
        let text = serde_json::to_string_pretty(value)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn finish(mut self, outcome: &Result<()>) -> Result<PathBuf> {
        self.manifest.finished_at = Some(now());
        match outcome {
            Ok(()) => self.manifest.status = "ok".into(),
            Err(e) => {
                self.manifest.status = "error".into();
                self.manifest.error = Some(e.to_string());
            }
        }
        let manifest = self.manifest.clone();
        let path = self.dir.join("manifest.json");
        std::fs::create_dir_all(&self.dir)?;
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }
}
