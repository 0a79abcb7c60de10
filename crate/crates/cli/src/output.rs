use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use heatobs::EstimateReport;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

/// Name of the per-check report file merged by `report`.
pub const REPORTS_FILE: &str = "reports.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Destination of one check's files.
pub struct Sink {
    dir: PathBuf,
    json: bool,
    csv: bool,
}

impl Sink {
    pub fn new(root: &Path, check: &str, formats: &[String]) -> Result<Self> {
        Self::at(root.join(check), formats)
    }

    pub fn at(dir: PathBuf, formats: &[String]) -> Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir,
            json: formats.iter().any(|f| f == "json"),
            csv: formats.iter().any(|f| f == "csv"),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write(&self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))
    }

    pub fn reports(&self, reports: &[EstimateReport]) -> Result<()> {
        if self.json {
            let mut text = serde_json::to_string_pretty(reports)?;
            text.push('\n');
            self.write(REPORTS_FILE, text.as_bytes())?;
        }
        Ok(())
    }

    pub fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        if self.json {
            let mut text = serde_json::to_string_pretty(value)?;
            text.push('\n');
            self.write(name, text.as_bytes())?;
        }
        Ok(())
    }

    pub fn csv(&self, name: &str, text: &str) -> Result<()> {
        if self.csv {
            self.write(name, text.as_bytes())?;
        }
        Ok(())
    }

    /// Resolved config and the SHA-256 of everything the check read.
    pub fn manifest(&self, command: &str, config: &ExperimentConfig, extra_inputs: &[&[u8]]) -> Result<()> {
        let resolved = serde_json::to_value(config)?;
        let mut hasher = Sha256::new();
        hasher.update(serde_json::to_string(&resolved)?.as_bytes());
        for bytes in extra_inputs {
            hasher.update(bytes);
        }
        let manifest = serde_json::json!({
            "command": command,
            "config": resolved,
            "input_sha256": hex::encode(hasher.finalize()),
        });
        let mut text = serde_json::to_string_pretty(&manifest)?;
        text.push('\n');
        self.write(MANIFEST_FILE, text.as_bytes())
    }
}

/// CSV text from a header and rows of displayable cells.
pub fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn num(x: f64) -> String {
    format!("{x:?}")
}
