//! Run reports and their JSON form.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One row of a sweep (or the single row of a spectrum run).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EpsRecord {
    pub eps: Option<f64>,
    pub nodes: usize,
    pub top_eigenvalue: Option<f64>,
    pub leading_coefficient: Option<f64>,
    pub log_norm: Option<f64>,
    pub fitted_exponent: Option<f64>,
    /// Scenario-specific rescaled quantity (lambda eps^{2m} or c_0 eps^{-m}).
    pub scaled_value: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub regime: String,
    pub classification: Option<String>,
    pub positive_count: Option<usize>,
    /// Fitted and reference constants; non-finite values are dropped.
    pub constants: BTreeMap<String, f64>,
}

impl Summary {
    pub fn set(&mut self, key: &str, value: f64) {
        if value.is_finite() {
            self.constants.insert(key.to_string(), value);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    pub scenario: String,
    /// The resolved config, rendered.
    pub config: String,
    pub records: Vec<EpsRecord>,
    pub summary: Summary,
    /// Full output of the underlying computation.
    pub details: serde_json::Value,
    pub wall_clock_seconds: f64,
}

impl RunReport {
    pub fn to_json(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        Ok(text)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
        serde_json::from_str(&text).map_err(|e| CliError::Report { path: path.to_owned(), message: e.to_string() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergedReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub entries: Vec<RunReport>,
}

/// Merges reports that share this tool's schema version and a common tool version.
pub fn merge(reports: Vec<RunReport>) -> Result<MergedReport, CliError> {
    let first = reports.first().ok_or_else(|| CliError::Config("no reports to merge".into()))?;
    let tool_version = first.tool_version.clone();
    for r in &reports {
        if r.schema_version != SCHEMA_VERSION {
            return Err(CliError::SchemaMismatch {
                scenario: r.scenario.clone(),
                found: format!("schema {}", r.schema_version),
                expected: format!("schema {SCHEMA_VERSION}"),
            });
        }
        if r.tool_version != tool_version {
            return Err(CliError::SchemaMismatch {
                scenario: r.scenario.clone(),
                found: format!("version {}", r.tool_version),
                expected: format!("version {tool_version}"),
            });
        }
    }
    Ok(MergedReport { schema_version: SCHEMA_VERSION, tool_version, entries: reports })
}

/// Fixed-width text summary, one line per entry.
pub fn merged_table(merged: &MergedReport) -> String {
    let mut out = format!(
        "{:<24} {:<9} {:<14} {:<22} {:>9} {:>8}\n",
        "scenario", "command", "regime", "classification", "positive", "records"
    );
    for e in &merged.entries {
        out.push_str(&format!(
            "{:<24} {:<9} {:<14} {:<22} {:>9} {:>8}\n",
            e.scenario,
            e.command,
            e.summary.regime,
            e.summary.classification.as_deref().unwrap_or("-"),
            e.summary.positive_count.map_or("-".to_string(), |c| c.to_string()),
            e.records.len()
        ));
    }
    out
}
