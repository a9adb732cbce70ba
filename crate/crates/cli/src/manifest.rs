//! Run manifests: line-oriented `key=value` records of a command invocation.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::Path;

use sha2::{Digest, Sha256};

#[derive(Debug, Default)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        let mut manifest = RunManifest::default();
        manifest.set("command", command);
        manifest
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn flag(&mut self, name: &str, value: impl ToString) {
        self.set(format!("flag.{name}"), value);
    }

    /// Records the SHA-256 of an input file under `digest.<path>`.
    pub fn digest(&mut self, path: &Path) -> io::Result<()> {
        let hash = sha256_file(path)?;
        self.set(format!("digest.{}", path.display()), format!("sha256:{hash}"));
        Ok(())
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (key, value) in &self.entries {
            writeln!(w, "{key}={value}")?;
        }
        w.flush()
    }
}

pub fn sha256_file(path: &Path) -> io::Result<String> {
    let mut hasher = Sha256::new();
    io::copy(&mut BufReader::new(File::open(path)?), &mut hasher)?;
    Ok(hex::encode(hasher.finalize()))
}
