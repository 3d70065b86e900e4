//! Atomic output files and the per-directory run manifest.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "run_manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

/// Write through a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("temp file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub config_hash: String,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub counts: BTreeMap<String, u64>,
}

/// One entry per stage run into the directory; a rerun replaces its stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub stages: BTreeMap<String, StageRecord>,
}

impl RunManifest {
    pub fn read(path: &Path) -> Option<Self> {
        let text = std::fs::read_to_string(path).ok()?;
        match serde_json::from_str(&text) {
            Ok(m) => Some(m),
            Err(e) => {
                tracing::warn!(path = %path.display(), error = %e, "ignoring unreadable manifest");
                None
            }
        }
    }
}

/// Collects what a stage read and wrote, then records it in the manifest.
pub struct Stage {
    name: String,
    out_dir: PathBuf,
    record: StageRecord,
}

impl Stage {
    pub fn new(name: &str, out_dir: &Path, config_hash: String) -> Self {
        Self {
            name: name.to_string(),
            out_dir: out_dir.to_path_buf(),
            record: StageRecord { config_hash, ..Default::default() },
        }
    }

    pub fn input(&mut self, path: &Path) -> anyhow::Result<()> {
        self.record.inputs.push(FileDigest { path: path.display().to_string(), sha256: sha256_file(path)? });
        Ok(())
    }

    /// Write `name` in the output directory and remember its digest.
    pub fn output(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<PathBuf> {
        let path = self.out_dir.join(name);
        write_atomic(&path, bytes)?;
        self.record.outputs.push(FileDigest { path: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(path)
    }

    pub fn count(&mut self, key: &str, n: usize) {
        self.record.counts.insert(key.to_string(), n as u64);
    }

    pub fn finish(self) -> anyhow::Result<StageRecord> {
        let path = self.out_dir.join(MANIFEST_NAME);
        let mut manifest = RunManifest::read(&path).unwrap_or_default();
        manifest.tool = "notestd".into();
        manifest.version = env!("CARGO_PKG_VERSION").into();
        manifest.stages.insert(self.name, self.record.clone());
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        write_atomic(&path, &bytes)?;
        Ok(self.record)
    }
}
