//! Run manifests: a JSON record written next to experiment outputs so a
//! result file can always be traced back to its exact inputs.

use std::io::Read;
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct DatasetInfo {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct FailedCell {
    pub predictor: String,
    pub mode: String,
    pub fraction: f64,
    pub error: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// The fully resolved configuration the run used.
    pub config: serde_json::Value,
    pub dataset: DatasetInfo,
    pub base_seed: u64,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
    pub failed_cells: Vec<FailedCell>,
}

impl RunManifest {
    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let file = std::fs::File::create(path)
            .with_context(|| format!("creating manifest {}", path.display()))?;
        serde_json::to_writer_pretty(file, self).context("serializing manifest")?;
        Ok(())
    }
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    use sha2::Digest;
    let mut file = std::fs::File::open(path)
        .with_context(|| format!("hashing dataset {}", path.display()))?;
    let mut hasher = sha2::Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}
