//! Provenance record printed by every subcommand under `--json`.

use std::fs;
use std::path::Path;

use addrtag_core::tagger::FEATURE_TEMPLATE_VERSION;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model_io::MODEL_FORMAT_VERSION;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileFingerprint {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl FileFingerprint {
    pub fn of(path: &Path) -> Result<Self> {
        let data = fs::read(path).map_err(|e| Error::io(path, e))?;
        Ok(FileFingerprint {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&data)),
            bytes: data.len() as u64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Versions {
    pub tool: &'static str,
    pub model_format: u64,
    pub feature_template: u32,
}

impl Default for Versions {
    fn default() -> Self {
        Versions {
            tool: env!("CARGO_PKG_VERSION"),
            model_format: MODEL_FORMAT_VERSION,
            feature_template: FEATURE_TEMPLATE_VERSION,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub seed: u64,
    pub versions: Versions,
    pub gazetteer: Option<serde_json::Value>,
    pub inputs: Vec<FileFingerprint>,
    pub outputs: Vec<FileFingerprint>,
    pub result: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            seed,
            versions: Versions::default(),
            gazetteer: None,
            inputs: Vec::new(),
            outputs: Vec::new(),
            result: serde_json::Value::Null,
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<()> {
        self.inputs.push(FileFingerprint::of(path)?);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) -> Result<()> {
        self.outputs.push(FileFingerprint::of(path)?);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sha256_of_known_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("abc");
        fs::write(&p, "abc").unwrap();
        let f = FileFingerprint::of(&p).unwrap();
        assert_eq!(f.sha256, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        assert_eq!(f.bytes, 3);
    }
}
