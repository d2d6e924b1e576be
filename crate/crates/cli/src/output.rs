use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use lingam_spp::Dataset;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Invalid;

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<String>,
}

/// Output directory of one command. Inputs read through it feed the config
/// digest; every file lands atomically and is listed in the manifest.
pub struct Run {
    dir: PathBuf,
    command: String,
    started: String,
    digest: Sha256,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(dir: &Path, command: &str, options: &impl Serialize) -> anyhow::Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let mut digest = Sha256::new();
        digest.update(command.as_bytes());
        digest.update(serde_json::to_vec(options)?);
        Ok(Self {
            dir: dir.to_path_buf(),
            command: command.to_string(),
            started: chrono::Utc::now().to_rfc3339(),
            digest,
            outputs: Vec::new(),
        })
    }

    pub fn read_input(&mut self, path: &Path) -> anyhow::Result<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| Invalid(format!("cannot read {}: {e}", path.display())))?;
        self.digest.update((bytes.len() as u64).to_le_bytes());
        self.digest.update(&bytes);
        Ok(bytes)
    }

    pub fn read_csv(&mut self, path: &Path) -> anyhow::Result<Dataset> {
        let bytes = self.read_input(path)?;
        parse_csv(&bytes).map_err(|e| Invalid(format!("{}: {e}", path.display())).into())
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> anyhow::Result<()> {
        write_atomic(&self.dir.join(name), bytes)?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    pub fn write_json(&mut self, name: &str, value: &impl Serialize) -> anyhow::Result<()> {
        let mut text = serde_json::to_vec_pretty(value)?;
        text.push(b'\n');
        self.write(name, &text)
    }

    pub fn write_jsonl<T: Serialize>(&mut self, name: &str, rows: &[T]) -> anyhow::Result<()> {
        let mut text = Vec::new();
        for r in rows {
            serde_json::to_writer(&mut text, r)?;
            text.push(b'\n');
        }
        self.write(name, &text)
    }

    pub fn finish(self) -> anyhow::Result<()> {
        let manifest = RunManifest {
            command: self.command,
            config_digest: format!("{:x}", self.digest.finalize()),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started: self.started,
            finished: chrono::Utc::now().to_rfc3339(),
            outputs: self.outputs,
        };
        let mut text = serde_json::to_vec_pretty(&manifest)?;
        text.push(b'\n');
        write_atomic(&self.dir.join("manifest.json"), &text)
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub fn parse_csv(bytes: &[u8]) -> Result<Dataset, String> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(bytes);
    let names: Vec<String> = reader.headers().map_err(|e| e.to_string())?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, v)| v.parse::<f64>().map_err(|_| format!("row {}, column {}: '{v}' is not a number", i + 1, j + 1)))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Dataset::from_rows(&rows, names).map_err(|e| e.to_string())
}

pub fn csv_bytes(data: &Dataset) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(data.names())?;
    for i in 0..data.n_samples() {
        w.write_record(data.row(i).iter().map(|v| v.to_string()))?;
    }
    Ok(w.into_inner()?)
}
