use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// SHA-256 over the argument vector and every input file read.
    pub input_hash: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: Vec<String>,
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Accumulates the bytes that identify a run.
#[derive(Default)]
pub struct InputHash(Sha256);

impl InputHash {
    pub fn update(&mut self, bytes: &[u8]) {
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn hex(&self) -> String {
        hex::encode(self.0.clone().finalize())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Sends documents either to stdout or, with `--out`, to files in a
/// directory followed by a manifest.
pub struct Emitter<'a> {
    dir: Option<PathBuf>,
    stdout: &'a mut dyn Write,
    written: Vec<String>,
    started: u64,
}

impl<'a> Emitter<'a> {
    pub fn new(dir: Option<PathBuf>, stdout: &'a mut dyn Write) -> Self {
        Self {
            dir,
            stdout,
            written: Vec::new(),
            started: unix_now(),
        }
    }

    pub fn to_files(&self) -> bool {
        self.dir.is_some()
    }

    pub fn emit(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        match &self.dir {
            Some(dir) => {
                fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                let path = dir.join(name);
                fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
                self.written.push(name.to_string());
            }
            None => {
                self.stdout
                    .write_all(contents.as_bytes())
                    .map_err(|e| CliError::Runtime(format!("cannot write to stdout: {e}")))?;
            }
        }
        Ok(())
    }

    pub fn finish(self, command: &str, hash: &InputHash) -> Result<(), CliError> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        let manifest = RunManifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            input_hash: hash.hex(),
            started_unix: self.started,
            finished_unix: unix_now(),
            outputs: self.written.clone(),
        };
        let path = dir.join("manifest.json");
        fs::write(&path, json(&manifest)?).map_err(|e| CliError::io(&path, e))
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn csv_document(header: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
}
