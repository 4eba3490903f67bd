//! Files on disk: atomic writes and the run manifest.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Writes `contents` to a temporary file next to `path`, then renames it into
/// place, so an interrupted run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a temporary file in {}", dir.display()))?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        write!(s, "{b:02x}").expect("string write");
    }
    s
}

/// Collects the files of one experiment directory.
pub struct ExperimentDir {
    root: PathBuf,
    files: Vec<String>,
}

impl ExperimentDir {
    pub fn new(root: PathBuf) -> Self {
        ExperimentDir { root, files: Vec::new() }
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        write_atomic(&self.root.join(name), contents.as_bytes())?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub fn files(self) -> Vec<String> {
        self.files
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub version: String,
    /// Seconds since the Unix epoch when the run finished. The only
    /// non-reproducible value a run writes.
    pub created_unix: u64,
    /// `preset NAME` or `config PATH`.
    pub source: String,
    pub scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed_override: Option<u64>,
    /// Effective configuration; rerun with `fss --config` on it.
    pub config: String,
    pub experiment: Vec<ManifestEntry>,
}

#[derive(Debug, Serialize)]
pub struct ManifestEntry {
    pub label: String,
    pub mode: String,
    pub seed: u64,
    /// SHA-256 of the experiment's canonical TOML.
    pub config_sha256: String,
    pub files: Vec<String>,
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/x.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
