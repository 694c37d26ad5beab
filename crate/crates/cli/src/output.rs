use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{json, Value};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// Directory used for output files when `--out` is not given.
pub const OUT_DIR_ENV: &str = "MFNEAR_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Text => "txt",
        }
    }
}

/// One command's result in all three renderings.
pub struct Report {
    pub command: String,
    pub seed: Option<u64>,
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub text: String,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => {
                let mut envelope = json!({
                    "schema_version": SCHEMA_VERSION,
                    "command": self.command,
                    "result": self.result,
                });
                if let Some(seed) = self.seed {
                    envelope["seed"] = json!(seed);
                }
                Ok(serde_json::to_string_pretty(&envelope)? + "\n")
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header)?;
                for row in &self.rows {
                    w.write_record(row)?;
                }
                Ok(String::from_utf8(w.into_inner()?)?)
            }
            Format::Text => {
                let mut s = self.text.clone();
                if let Some(seed) = self.seed {
                    s.push_str(&format!("seed {seed}\n"));
                }
                Ok(s)
            }
        }
    }

    /// Writes to `out`, else to the default directory, else to stdout.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<Option<PathBuf>> {
        let body = self.render(format)?;
        let target = match out {
            Some(p) => Some(p.to_path_buf()),
            None => std::env::var_os(OUT_DIR_ENV)
                .filter(|d| !d.is_empty())
                .map(|d| PathBuf::from(d).join(format!("{}.{}", self.command.replace(' ', "-"), format.extension()))),
        };
        match target {
            Some(path) => {
                if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                }
                fs::write(&path, body).with_context(|| format!("writing {}", path.display()))?;
                Ok(Some(path))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(body.as_bytes())?;
                stdout.flush()?;
                Ok(None)
            }
        }
    }
}
