//! CSV series and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::config::Config;
use crate::error::CliError;

pub const MANIFEST_NAME: &str = "manifest.json";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Output directory that remembers every file written into it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<String>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root)?;
        Ok(Self {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    /// Writes an RFC-4180 CSV file (CRLF line ends) with a header row.
    pub fn write_csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_path(self.root.join(name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Everything recorded about one run.
#[derive(Debug)]
pub struct Manifest {
    pub command: String,
    pub config: Config,
    pub seed: u64,
    pub workers: usize,
    pub started: f64,
    pub summary: Map<String, Value>,
}

impl Manifest {
    pub fn new(command: &str, config: &Config, seed: u64, workers: usize) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            seed,
            workers,
            started: unix_time(),
            summary: Map::new(),
        }
    }

    pub fn record(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.to_string(), value.into());
    }

    /// Writes `manifest.json`; keys come out sorted.
    pub fn write(
        &self,
        out: &OutputDir,
        status: &str,
        error: Option<&CliError>,
    ) -> Result<(), CliError> {
        let value = json!({
            "command": self.command,
            "config": self.config,
            "error": error.map(|e| e.to_string()),
            "outputs": out.files(),
            "seed": self.seed,
            "sigma": self.config.sigma(),
            "status": status,
            "summary": self.summary,
            "timestamps": { "started_unix": self.started, "finished_unix": unix_time() },
            "version": env!("CARGO_PKG_VERSION"),
            "workers": self.workers,
        });
        let mut text = serde_json::to_string_pretty(&value).map_err(std::io::Error::from)?;
        text.push('\n');
        fs::write(out.root().join(MANIFEST_NAME), text)?;
        Ok(())
    }
}

fn unix_time() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}
