//! Ordered file emission with a content-hashed manifest.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    /// Relative to the output directory.
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub pipeline: String,
    pub seed: u64,
    pub files: Vec<ManifestEntry>,
    /// Interpolated returns per input series.
    pub interpolated_points: BTreeMap<String, usize>,
}

impl Manifest {
    pub fn entry(&self, path: &str) -> Option<&ManifestEntry> {
        self.files.iter().find(|e| e.path == path)
    }
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Writes files one at a time into a directory and records their hashes.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<ManifestEntry>,
}

impl OutputDir {
    pub fn create(root: impl AsRef<Path>) -> Result<Self> {
        std::fs::create_dir_all(root.as_ref())?;
        Ok(OutputDir { root: root.as_ref().to_path_buf(), files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        std::fs::write(self.root.join(name), bytes)?;
        self.files.push(ManifestEntry { path: name.to_string(), sha256: hex::encode(Sha256::digest(bytes)), bytes: bytes.len() });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    /// Numeric table. Values use the shortest representation that parses
    /// back to the same f64.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.write_record(&r)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        self.write_bytes(name, &bytes)
    }

    /// Writes the manifest last and returns it.
    pub fn finish(mut self, pipeline: &str, seed: u64, interpolated_points: BTreeMap<String, usize>) -> Result<Manifest> {
        let manifest = Manifest { pipeline: pipeline.to_string(), seed, files: std::mem::take(&mut self.files), interpolated_points };
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        std::fs::write(self.root.join(MANIFEST_NAME), text)?;
        Ok(manifest)
    }
}

/// Formats a row of floats for [`OutputDir::write_csv`].
pub fn row(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_through_csv_text() {
        for v in [0.1 + 0.2, 1.0 / 3.0, -2.4820e-5, 1e-300, 123456789.123456789] {
            assert_eq!(row(&[v])[0].parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn manifest_hashes_written_bytes() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::create(dir.path()).unwrap();
        out.write_csv("a.csv", &["x"], vec![row(&[1.5])]).unwrap();
        let m = out.finish("test", 1, BTreeMap::new()).unwrap();
        let bytes = std::fs::read(dir.path().join("a.csv")).unwrap();
        assert_eq!(bytes, b"x\n1.5\n");
        assert_eq!(m.files[0].sha256, hex::encode(Sha256::digest(&bytes)));
        assert!(dir.path().join(MANIFEST_NAME).exists());
    }
}
