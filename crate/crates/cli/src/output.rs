//! Tabular output, the per-run writer and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, OutputFormat};
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
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

impl Cell {
    // both float forms are the shortest strings that parse back exactly
    fn csv_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) if *v == 0.0 || !v.is_finite() || (1e-4..1e15).contains(&v.abs()) => v.to_string(),
            Cell::Float(v) => format!("{v:e}"),
            Cell::Text(v) => v.clone(),
            Cell::Bool(v) => v.to_string(),
        }
    }

    // NaN and infinities have no JSON number form and become null
    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => (*v).into(),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(serde_json::Value::Number)
                .unwrap_or(serde_json::Value::Null),
            Cell::Text(v) => v.clone().into(),
            Cell::Bool(v) => (*v).into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width differs from header");
        self.rows.push(row);
    }

    /// CSV with a header line.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv_text)).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    /// `{"columns": [...], "rows": [[...], ...]}`, keeping column order.
    pub fn to_json(&self) -> Vec<u8> {
        let rows: Vec<Vec<serde_json::Value>> =
            self.rows.iter().map(|r| r.iter().map(Cell::json).collect()).collect();
        let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
        let mut out = serde_json::to_vec_pretty(&doc).expect("plain JSON values");
        out.push(b'\n');
        out
    }

    pub fn encode(&self, format: OutputFormat) -> Vec<u8> {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    /// Relative to the output directory.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub software: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub stages: Vec<StageTiming>,
    pub files: Vec<FileRecord>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Owns the output directory for one run. All files go through here, one
/// writer at a time, so the manifest sees every one of them.
#[derive(Debug)]
pub struct RunWriter {
    dir: PathBuf,
    format: OutputFormat,
    files: Vec<FileRecord>,
    stages: Vec<StageTiming>,
}

impl RunWriter {
    pub fn create(dir: &Path, format: OutputFormat) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            files: Vec::new(),
            stages: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn format(&self) -> OutputFormat {
        self.format
    }

    pub fn files(&self) -> &[FileRecord] {
        &self.files
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(path.display(), e))?;
        self.files.retain(|f| f.path != name);
        self.files.push(FileRecord {
            path: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(bytes),
        });
        Ok(path)
    }

    /// Writes `stem.csv` or `stem.json` depending on the run format.
    pub fn write_table(&mut self, stem: &str, table: &Table) -> Result<PathBuf, CliError> {
        let name = format!("{stem}.{}", self.format.extension());
        self.write_bytes(&name, &table.encode(self.format))
    }

    pub fn record_stage(&mut self, stage: impl Into<String>, seconds: f64) {
        self.stages.push(StageTiming {
            stage: stage.into(),
            seconds,
        });
    }

    pub fn timed<T>(&mut self, stage: &str, f: impl FnOnce(&mut Self) -> Result<T, CliError>) -> Result<T, CliError> {
        let start = Instant::now();
        let out = f(self);
        self.record_stage(stage, start.elapsed().as_secs_f64());
        out
    }

    /// Writes `manifest.json` and returns it.
    pub fn finish(self, command: &str, config: &ExperimentConfig) -> Result<RunManifest, CliError> {
        let manifest = RunManifest {
            command: command.to_string(),
            software: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            stages: self.stages,
            files: self.files,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest is plain data");
        bytes.push(b'\n');
        let path = self.dir.join(MANIFEST_NAME);
        fs::write(&path, bytes).map_err(|e| CliError::io(path.display(), e))?;
        Ok(manifest)
    }
}
