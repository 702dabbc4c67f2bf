use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Writes files into one output directory and remembers their hashes.
pub struct Artifacts {
    dir: PathBuf,
    records: Vec<ArtifactRecord>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            records: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.records.push(ArtifactRecord {
            path: name.to_string(),
            bytes: contents.len(),
            sha256: hex::encode(Sha256::digest(contents)),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// `<verb>.manifest.json`: the full configuration, the artifact hashes and
    /// a verb-specific summary. Contains nothing time- or host-dependent.
    pub fn finish<S: Serialize>(mut self, verb: &str, config: &RunConfig, summary: &S) -> Result<PathBuf, CliError> {
        #[derive(Serialize)]
        struct Manifest<'a, S> {
            schema_version: u32,
            command: &'a str,
            config: &'a RunConfig,
            summary: &'a S,
            artifacts: &'a [ArtifactRecord],
        }
        let manifest = Manifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            command: verb,
            config,
            summary,
            artifacts: &self.records.clone(),
        };
        self.write_json(&format!("{verb}.manifest.json"), &manifest)
    }
}
