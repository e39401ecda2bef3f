use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::CliResult;

pub const MANIFEST_FILE: &str = "manifest.json";

/// One per run, written next to the outputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub version: String,
    /// The resolved configuration, flags included.
    pub config: Config,
    pub wall_time_seconds: f64,
    /// Paths relative to the output directory.
    pub outputs: Vec<String>,
    /// Largest norm drift over all trajectories; absent for static reports.
    pub norm_drift: Option<f64>,
    pub warnings: Vec<String>,
}

impl Manifest {
    pub fn new(subcommand: &str, config: &Config) -> Self {
        Self {
            subcommand: subcommand.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config: config.clone(),
            wall_time_seconds: 0.0,
            outputs: Vec::new(),
            norm_drift: None,
            warnings: Vec::new(),
        }
    }
}

/// Writes `value` as pretty JSON and returns the path.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).expect("reports always serialize");
    text.push('\n');
    fs::write(&path, text)?;
    Ok(path)
}

/// Fixed-schema CSV with every float written to 17 significant digits.
pub struct CsvWriter {
    out: BufWriter<fs::File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &str) -> CliResult<Self> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        let mut out = BufWriter::new(fs::File::create(path)?);
        writeln!(out, "{header}")?;
        Ok(Self { out })
    }

    pub fn profile_rows(&mut self, t: f64, profile: &[f64]) -> CliResult<()> {
        for (site, sz) in profile.iter().enumerate() {
            writeln!(self.out, "{t:.16e},{},{sz:.16e}", site + 1)?;
        }
        Ok(())
    }

    pub fn pair(&mut self, t: f64, value: f64) -> CliResult<()> {
        writeln!(self.out, "{t:.16e},{value:.16e}")?;
        Ok(())
    }

    pub fn finish(mut self) -> CliResult<()> {
        self.out.flush()?;
        Ok(())
    }
}
