#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use tact_cli::{run, Command, ExperimentConfig};

pub struct Csv {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Csv {
    pub fn read(path: &Path) -> Csv {
        let mut r = csv::Reader::from_path(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let columns = r.headers().unwrap().iter().map(str::to_string).collect();
        let rows = r
            .records()
            .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
            .collect();
        Csv { columns, rows }
    }

    pub fn idx(&self, name: &str) -> usize {
        self.columns
            .iter()
            .position(|c| c == name)
            .unwrap_or_else(|| panic!("no column {name} in {:?}", self.columns))
    }

    pub fn floats(&self, name: &str) -> Vec<f64> {
        let i = self.idx(name);
        self.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }

    pub fn text(&self, name: &str) -> Vec<String> {
        let i = self.idx(name);
        self.rows.iter().map(|r| r[i].clone()).collect()
    }
}

pub fn config(out: &Path, toml_text: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_toml_str(toml_text).unwrap();
    cfg.out_dir = out.to_path_buf();
    cfg
}

pub fn run_in(dir: &Path, command: Command, toml_text: &str) -> PathBuf {
    let cfg = config(dir, toml_text);
    run(command, &cfg).unwrap_or_else(|e| panic!("{} failed: {e}", command.name()));
    dir.to_path_buf()
}

/// Every regular file under `dir` by relative path.
pub fn read_tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            out.insert(
                entry.file_name().to_string_lossy().into_owned(),
                fs::read(entry.path()).unwrap(),
            );
        }
    }
    out
}

pub fn min(v: &[f64]) -> f64 {
    v.iter().copied().filter(|x| x.is_finite()).fold(f64::INFINITY, f64::min)
}

pub fn max(v: &[f64]) -> f64 {
    v.iter().copied().filter(|x| x.is_finite()).fold(f64::NEG_INFINITY, f64::max)
}
