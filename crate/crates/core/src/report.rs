//! Machine-readable run reports.
//!
//! `report.json` is deterministic for a fixed config and seed; wall time and
//! other non-reproducible metadata go to a separate `report.meta.json`
//! sidecar so the main report stays byte-identical across reruns.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::RunConfig;
use crate::harnack::HarnackReport;
use crate::numerics::RadialFunction;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write report: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub artifact_version: String,
    pub command: String,
    /// Echo of the effective configuration; re-parses to the same RunConfig.
    pub config: RunConfig,
    /// Command-specific payload.
    pub results: serde_json::Value,
}

/// Non-reproducible metadata, kept out of `report.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportSidecar {
    pub wall_time_ms: u128,
}

impl Report {
    pub fn new(command: &str, config: RunConfig, results: serde_json::Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config,
            results,
        }
    }

    pub fn to_json(&self) -> Result<String, ReportError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Write `report.json` and its `report.meta.json` sidecar into `dir`.
    pub fn write(&self, dir: &Path, wall_time_ms: u128) -> Result<PathBuf, ReportError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join("report.json");
        std::fs::write(&path, self.to_json()? + "\n")?;
        let sidecar = serde_json::to_string_pretty(&ReportSidecar { wall_time_ms })?;
        std::fs::write(dir.join("report.meta.json"), sidecar + "\n")?;
        Ok(path)
    }
}

/// 17 significant digits: enough to round-trip any f64 exactly, so CSV
/// diffs detect any numeric change.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a radial profile as `r,u` CSV.
pub fn write_profile_csv(path: &Path, profile: &RadialFunction) -> Result<(), ReportError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "r,u")?;
    for (&r, &u) in profile.grid().points().iter().zip(profile.values()) {
        writeln!(f, "{},{}", fmt_f64(r), fmt_f64(u))?;
    }
    Ok(())
}

/// Write a Harnack scan as `lambda,sup,inf,ratio` CSV.
pub fn write_harnack_csv(path: &Path, report: &HarnackReport) -> Result<(), ReportError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "lambda,sup,inf,ratio")?;
    for row in &report.rows {
        writeln!(f, "{},{},{},{}", fmt_f64(row.lambda), fmt_f64(row.sup_k), fmt_f64(row.inf_k), fmt_f64(row.ratio))?;
    }
    Ok(())
}
