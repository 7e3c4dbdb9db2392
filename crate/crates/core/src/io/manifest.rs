use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use super::output::{sha256_hex, write_atomic};
use crate::error::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// File name relative to the output directory.
    pub file: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub exit_code: i32,
    pub message: String,
}

/// Provenance record written next to every run's outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_sha256: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<OutputRecord>,
    pub status: String,
    pub error: Option<ErrorRecord>,
}

pub(crate) fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

impl RunManifest {
    pub fn start(command: &str, config_sha256: &str) -> Self {
        let t = now_ms();
        RunManifest {
            tool: "thirring".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_sha256: config_sha256.into(),
            started_unix_ms: t,
            finished_unix_ms: t,
            outputs: Vec::new(),
            status: "running".into(),
            error: None,
        }
    }

    /// Write `bytes` to `dir/file` atomically and record its digest.
    pub fn add_output(&mut self, dir: &Path, file: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&dir.join(file), bytes)?;
        self.outputs.push(OutputRecord { file: file.into(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(())
    }

    pub fn finish_ok(&mut self) {
        self.finished_unix_ms = now_ms();
        self.status = "ok".into();
    }

    pub fn finish_err(&mut self, err: &Error) {
        self.finished_unix_ms = now_ms();
        self.status = "error".into();
        self.error = Some(ErrorRecord { exit_code: err.exit_code(), message: err.to_string() });
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(self).expect("manifest serializes");
        bytes.push(b'\n');
        write_atomic(&dir.join(MANIFEST_FILE), &bytes)
    }

    /// Output digests keyed by file name, for reproducibility comparisons.
    pub fn digests(&self) -> Vec<(String, String)> {
        self.outputs.iter().map(|o| (o.file.clone(), o.sha256.clone())).collect()
    }
}
