//! Run manifests: everything needed to regenerate an output file.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputDigest {
    /// Output path, or `-` for standard output.
    pub target: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Arguments after the program name; rerunning them reproduces the output.
    pub argv: Vec<String>,
    pub parameters: serde_json::Value,
    pub library_version: String,
    pub cli_version: String,
    pub seed: u64,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunManifest {
    pub fn new(
        command: &str,
        argv: &[String],
        parameters: serde_json::Value,
        seed: u64,
        target: &str,
        content: &[u8],
    ) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            command: command.to_string(),
            argv: argv.iter().skip(1).cloned().collect(),
            parameters,
            library_version: axial_fisher::VERSION.to_string(),
            cli_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp,
            outputs: vec![OutputDigest {
                target: target.to_string(),
                bytes: content.len(),
                sha256: sha256_hex(content),
            }],
        }
    }
}
