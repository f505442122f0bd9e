//! Run manifest: per stage, a hash of its settings, its seeds and the
//! SHA-256 of every input and output file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub config_hash: String,
    pub seeds: BTreeMap<String, u64>,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: u32,
    pub stages: BTreeMap<String, StageRecord>,
}

impl Default for Manifest {
    fn default() -> Self {
        Self {
            version: MANIFEST_VERSION,
            stages: BTreeMap::new(),
        }
    }
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::data(format!("cannot read {} for checksumming: {e}", path.display())))?;
    Ok(sha256_bytes(&bytes))
}

/// A manifest bound to its location on disk. Output paths under the
/// manifest's directory are stored relative to it so that a run directory
/// can be moved without invalidating its manifest.
#[derive(Debug)]
pub struct ManifestFile {
    path: PathBuf,
    dir: PathBuf,
    pub data: Manifest,
}

impl ManifestFile {
    pub fn open(path: &Path) -> CliResult<Self> {
        let path = std::path::absolute(path)?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let data = if path.exists() {
            let bytes = std::fs::read(&path)?;
            let m: Manifest = serde_json::from_slice(&bytes)
                .map_err(|e| CliError::data(format!("corrupt manifest {}: {e}", path.display())))?;
            if m.version != MANIFEST_VERSION {
                return Err(CliError::data(format!(
                    "manifest {} has version {}, expected {MANIFEST_VERSION}",
                    path.display(),
                    m.version
                )));
            }
            m
        } else {
            Manifest::default()
        };
        Ok(Self { path, dir, data })
    }

    /// Key of an output file: relative to the manifest when below it.
    pub fn output_key(&self, p: &Path) -> String {
        let abs = std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf());
        match abs.strip_prefix(&self.dir) {
            Ok(rel) => rel.to_string_lossy().replace('\\', "/"),
            Err(_) => abs.to_string_lossy().into_owned(),
        }
    }

    fn resolve(&self, key: &str) -> PathBuf {
        let p = Path::new(key);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }

    /// Whether `stage` was recorded with `config_hash` and all of its
    /// outputs are still on disk with the recorded checksums.
    pub fn is_current(&self, stage: &str, config_hash: &str) -> bool {
        let Some(rec) = self.data.stages.get(stage) else {
            return false;
        };
        rec.config_hash == config_hash
            && rec.outputs.iter().all(|(key, sum)| {
                let p = self.resolve(key);
                p.is_file() && sha256_file(&p).is_ok_and(|s| &s == sum)
            })
    }

    pub fn record(&mut self, stage: &str, rec: StageRecord) {
        self.data.stages.insert(stage.to_string(), rec);
    }

    pub fn save(&self) -> CliResult<()> {
        let mut bytes = serde_json::to_vec_pretty(&self.data).map_err(|e| CliError::data(e.to_string()))?;
        bytes.push(b'\n');
        if let Some(parent) = self.path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        cityforge::png_io::write_atomic(&self.path, &bytes)?;
        Ok(())
    }
}

/// Input files are keyed by file name alone: their content is what
/// matters, not where they were read from.
pub fn input_key(p: &Path) -> String {
    p.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| p.to_string_lossy().into_owned())
}
