//! CSV assembly, atomic file writes and the run manifest.

use crate::error::{CliError, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Bumped whenever a column is renamed, removed or changes unit.
pub const SCHEMA_VERSION: u32 = 1;

/// One CSV cell. Floats use Rust's shortest round-trip `{:e}` form so the
/// bytes depend only on the value.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(if v { "true" } else { "false" }.into())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

fn write_cell(out: &mut String, c: &Cell) {
    match c {
        Cell::Float(v) if v.is_nan() => out.push_str("nan"),
        Cell::Float(v) if v.is_infinite() => out.push_str(if *v > 0.0 { "inf" } else { "-inf" }),
        Cell::Float(v) => write!(out, "{v:e}").unwrap(),
        Cell::Int(v) => write!(out, "{v}").unwrap(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => {
            write!(out, "\"{}\"", s.replace('"', "\"\"")).unwrap();
        }
        Cell::Text(s) => out.push_str(s),
    }
}

/// Column-checked CSV buffer.
#[derive(Debug, Clone)]
pub struct Csv {
    columns: usize,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self {
            columns: header.len(),
            text,
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns, "row width does not match the header");
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            write_cell(&mut self.text, c);
        }
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// A file a scenario wants written, relative to the output directory.
#[derive(Debug, Clone)]
pub struct OutputFile {
    pub name: String,
    pub contents: Vec<u8>,
}

impl OutputFile {
    pub fn csv(name: impl Into<String>, csv: Csv) -> Self {
        Self {
            name: name.into(),
            contents: csv.into_bytes(),
        }
    }

    pub fn text(name: impl Into<String>, text: String) -> Self {
        Self {
            name: name.into(),
            contents: text.into_bytes(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes through a temporary sibling and renames it into place.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<FileRecord> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.partial"));
    fs::write(&tmp, contents).map_err(|e| CliError::Io(format!("{}: {e}", tmp.display())))?;
    fs::rename(&tmp, &target).map_err(|e| CliError::Io(format!("{}: {e}", target.display())))?;
    Ok(FileRecord {
        file: name.to_string(),
        sha256: sha256_hex(contents),
        bytes: contents.len() as u64,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub scenario: String,
    pub library_version: String,
    pub cli_version: String,
    pub seed: u64,
    pub threads: usize,
    pub started_unix_s: u64,
    pub wall_clock_s: f64,
    pub config: crate::config::RunConfig,
    /// Quantities derived from the config that the outputs depend on.
    pub derived: serde_json::Map<String, serde_json::Value>,
    pub notes: Vec<String>,
    pub outputs: Vec<FileRecord>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Writes every output, then the manifest. Nothing is written when the
/// directory cannot be created.
pub fn write_all(dir: &Path, files: &[OutputFile]) -> Result<Vec<FileRecord>> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    files.iter().map(|f| write_atomic(dir, &f.name, &f.contents)).collect()
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(dir, MANIFEST_NAME, text.as_bytes())?;
    Ok(dir.join(MANIFEST_NAME))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_round_trip() {
        let mut c = Csv::new(&["a_m", "b", "c"]);
        c.row(vec![0.1.into(), 3usize.into(), "x,y".into()]);
        c.row(vec![f64::NAN.into(), (-2.5e-300).into(), "plain".into()]);
        let s = String::from_utf8(c.into_bytes()).unwrap();
        assert_eq!(s, "a_m,b,c\n1e-1,3,\"x,y\"\nnan,-2.5e-300,plain\n");
        let v: f64 = "1e-1".parse().unwrap();
        assert_eq!(v, 0.1);
    }

    #[test]
    fn digest_of_empty_input() {
        assert_eq!(sha256_hex(b""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }
}
