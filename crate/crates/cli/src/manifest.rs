//! Run manifests: what was run, with which configuration, and checksums of
//! everything written.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    /// Relative to the output directory, with `/` separators.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_hash: String,
    pub version: String,
    pub wall_clock_seconds: f64,
    pub files: Vec<FileEntry>,
    pub results: serde_json::Value,
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

impl RunManifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let text = fs::read_to_string(dir.join(MANIFEST_NAME))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Files whose checksum no longer matches.
    pub fn mismatches(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|f| sha256_file(&dir.join(&f.path)).map_or(true, |h| h != f.sha256))
            .map(|f| f.path.clone())
            .collect()
    }
}

/// Collects the files a command writes into its output directory.
pub struct Output {
    dir: PathBuf,
    files: Vec<String>,
    started: Instant,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
            started: Instant::now(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Registers `rel` and returns its absolute path, creating parent
    /// directories.
    pub fn path(&mut self, rel: &str) -> Result<PathBuf> {
        let p = self.dir.join(rel);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent)?;
        }
        if !self.files.iter().any(|f| f == rel) {
            self.files.push(rel.to_owned());
        }
        Ok(p)
    }

    pub fn write_json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<()> {
        let path = self.path(rel)?;
        let mut w = BufWriter::new(File::create(&path)?);
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn write_text(&mut self, rel: &str, text: &str) -> Result<()> {
        let path = self.path(rel)?;
        fs::write(path, text)?;
        Ok(())
    }

    pub fn finish(self, command: &str, config_hash: String, results: serde_json::Value) -> Result<RunManifest> {
        let files = self
            .files
            .iter()
            .map(|rel| {
                let p = self.dir.join(rel);
                Ok(FileEntry {
                    path: rel.clone(),
                    sha256: sha256_file(&p)?,
                    bytes: fs::metadata(&p)?.len(),
                })
            })
            .collect::<io::Result<Vec<_>>>()?;
        let manifest = RunManifest {
            command: command.to_owned(),
            config_hash,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            files,
            results,
        };
        let mut w = BufWriter::new(File::create(self.dir.join(MANIFEST_NAME))?);
        serde_json::to_writer_pretty(&mut w, &manifest)?;
        writeln!(w)?;
        w.flush()?;
        Ok(manifest)
    }
}
