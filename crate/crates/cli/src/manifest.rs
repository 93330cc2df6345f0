//! Run manifests: what a command read, what it wrote, and under which
//! configuration.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use fogpart_core::scenario::SCHEMA_VERSION;

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub tool_version: String,
    pub seed: Option<u64>,
    /// SHA-256 of the canonical JSON of `config`.
    pub config_sha256: String,
    pub config: Value,
    pub inputs: Vec<FileDigest>,
    /// Paths relative to the output directory.
    pub artifacts: Vec<FileDigest>,
    pub summary: Value,
    pub started_at: String,
    pub finished_at: String,
}

/// Current time, or `SOURCE_DATE_EPOCH` when set so reruns can produce
/// identical manifests.
pub fn timestamp() -> String {
    let fixed = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| DateTime::<Utc>::from_timestamp(secs, 0));
    fixed
        .unwrap_or_else(Utc::now)
        .to_rfc3339_opts(SecondsFormat::Secs, true)
}

/// Collects artifacts while a command runs and writes the manifest last.
pub struct ManifestBuilder {
    command: String,
    seed: Option<u64>,
    config: Value,
    out_dir: PathBuf,
    inputs: Vec<FileDigest>,
    artifacts: Vec<FileDigest>,
    started_at: String,
}

impl ManifestBuilder {
    pub fn new(command: &str, seed: Option<u64>, config: Value, out_dir: &Path) -> Result<Self> {
        fs::create_dir_all(out_dir)
            .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;
        Ok(Self {
            command: command.to_string(),
            seed,
            config,
            out_dir: out_dir.to_path_buf(),
            inputs: Vec::new(),
            artifacts: Vec::new(),
            started_at: timestamp(),
        })
    }

    pub fn input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.out_dir.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        self.artifacts.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len() as u64,
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).context("serializing output")?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(self, summary: Value) -> Result<PathBuf> {
        let canonical = serde_json::to_string(&self.config).expect("config serializes");
        let manifest = RunManifest {
            schema_version: SCHEMA_VERSION,
            command: self.command.clone(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: self.seed,
            config_sha256: sha256_hex(canonical.as_bytes()),
            config: self.config,
            inputs: self.inputs,
            artifacts: self.artifacts,
            summary,
            started_at: self.started_at,
            finished_at: timestamp(),
        };
        let path = self.out_dir.join(format!("{}.manifest.json", self.command));
        let mut text = serde_json::to_string_pretty(&manifest).context("serializing manifest")?;
        text.push('\n');
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?;
        Ok(path)
    }
}
