//! Output directory handling: atomic writes and the run manifest.

use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Open an input file, reporting a missing path as "file not found".
pub fn open_input(path: &Path) -> Result<BufReader<File>> {
    match File::open(path) {
        Ok(f) => Ok(BufReader::new(f)),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            anyhow::bail!("file not found: {}", path.display())
        }
        Err(e) => Err(e).with_context(|| format!("cannot open {}", path.display())),
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut r = open_input(path)?;
    let mut h = Sha256::new();
    std::io::copy(&mut r, &mut h)?;
    Ok(hex::encode(h.finalize()))
}

#[derive(Debug, Serialize)]
struct InputDigest {
    name: String,
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    config: &'a Value,
    inputs: &'a [InputDigest],
    outputs: &'a [String],
}

/// Collects the outputs of one command run.
///
/// Files are written to a temporary sibling and renamed into place, so a
/// reader never sees a partial file. The manifest is written last.
pub struct Run {
    dir: PathBuf,
    command: &'static str,
    config: Value,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(dir: &Path, command: &'static str, config: Value) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            command,
            config,
            inputs: Vec::new(),
            outputs: Vec::new(),
        })
    }

    /// Record an input's digest; fails if the file is missing.
    pub fn input(&mut self, name: &str, path: &Path) -> Result<()> {
        let sha256 = sha256_file(path)?;
        self.inputs.push(InputDigest {
            name: name.to_string(),
            path: path.display().to_string(),
            sha256,
        });
        Ok(())
    }

    pub fn write_with(&mut self, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<PathBuf> {
        let target = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        {
            let mut w = std::io::BufWriter::new(tmp.as_file_mut());
            body(&mut w)?;
            w.flush()?;
        }
        tmp.as_file().sync_all()?;
        tmp.persist(&target)
            .with_context(|| format!("cannot write {}", target.display()))?;
        self.outputs.push(name.to_string());
        Ok(target)
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        self.write_with(name, |w| Ok(w.write_all(bytes)?))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write_bytes(name, s.as_bytes())
    }

    pub fn finish(mut self) -> Result<()> {
        let m = Manifest {
            command: self.command,
            version: env!("CARGO_PKG_VERSION"),
            config: &self.config,
            inputs: &self.inputs,
            outputs: &self.outputs,
        };
        let mut s = serde_json::to_string_pretty(&m)?;
        s.push('\n');
        self.outputs.clear();
        self.write_bytes("manifest.json", s.as_bytes())?;
        Ok(())
    }
}

/// Seventeen significant digits, enough for an exact round trip.
pub fn sci17(x: f64) -> String {
    format!("{x:.16e}")
}
