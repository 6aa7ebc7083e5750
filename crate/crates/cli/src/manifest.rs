use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// What a dataset looked like when it was read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint {
    pub path: String,
    pub n: usize,
    pub p: usize,
    pub sha256: String,
}

/// Checksum of one output file. `excludes` names fields blanked before
/// hashing because they cannot repeat between runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub excludes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub timestamp: String,
    /// Fully resolved configuration; feeding it back as `--config`
    /// reproduces the run.
    pub config: serde_json::Value,
    pub seeds: BTreeMap<String, u64>,
    pub dataset: Option<Fingerprint>,
    pub outputs: BTreeMap<String, OutputRecord>,
}

impl Manifest {
    pub fn new<C: Serialize>(command: &str, argv: &[String], config: &C) -> CliResult<Self> {
        Ok(Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            argv: argv.to_vec(),
            timestamp: chrono::Utc::now().to_rfc3339(),
            config: serde_json::to_value(config)?,
            seeds: BTreeMap::new(),
            dataset: None,
            outputs: BTreeMap::new(),
        })
    }

    pub fn write(&self, path: &Path) -> CliResult<()> {
        write_file(path, serde_json::to_string_pretty(self)?.as_bytes())
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

/// Write `bytes` and return its output record.
pub fn write_recorded(path: &Path, bytes: &[u8]) -> CliResult<OutputRecord> {
    write_file(path, bytes)?;
    Ok(OutputRecord {
        path: path.display().to_string(),
        sha256: sha256_hex(bytes),
        excludes: Vec::new(),
    })
}
