//! Output files and the run manifest.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

pub const MANIFEST_FILE: &str = "run_manifest.json";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Config as it was understood, re-serialised.
    pub config: String,
    pub outputs: Vec<OutputDigest>,
    pub elapsed_ms: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunManifest {
    pub versions: BTreeMap<String, String>,
    /// Latest run of each subcommand.
    pub runs: BTreeMap<String, RunRecord>,
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self, CliError> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Artifact(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Artifact(format!("{}: {e}", path.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Files produced by one subcommand, written in insertion order.
#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(String, String)>,
}

impl Outputs {
    pub fn add(&mut self, name: impl Into<String>, content: String) {
        self.files.push((name.into(), content));
    }

    pub fn files(&self) -> &[(String, String)] {
        &self.files
    }

    /// Writes every file, then records their digests under `command` in
    /// the manifest of `dir`.
    pub fn write(self, dir: &Path, command: &str, config: &str, started: Instant) -> Result<RunRecord, CliError> {
        std::fs::create_dir_all(dir)?;
        let mut outputs = Vec::with_capacity(self.files.len());
        for (name, content) in &self.files {
            std::fs::write(dir.join(name), content)?;
            outputs.push(OutputDigest { file: name.clone(), sha256: sha256_hex(content.as_bytes()) });
        }
        let mut manifest = RunManifest::load(dir).unwrap_or_default();
        manifest.versions.insert("symdyn".into(), symdyn::VERSION.into());
        manifest.versions.insert("symdyn-cli".into(), env!("CARGO_PKG_VERSION").into());
        let record = RunRecord {
            config: config.to_string(),
            outputs,
            elapsed_ms: started.elapsed().as_millis() as u64,
        };
        manifest.runs.insert(command.to_string(), record.clone());
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(record)
    }
}
