//! CSV, JSON and text renderings of sweep results.
//!
//! CSV has one row per (configuration, workload, kernel type); the columns
//! are listed in [`CSV_COLUMNS`]. JSON carries the full reports plus trend
//! verdicts under a `schema_version` field.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::trend::CheckResult;
use super::{SweepCell, SweepTable};

pub const SCHEMA_VERSION: &str = "1.0";

/// JSON schema of the report document.
pub const JSON_SCHEMA: &str = include_str!("../../schema/report.schema.json");

pub const CSV_COLUMNS: [&str; 18] = [
    "scheme",
    "d",
    "f",
    "m",
    "n",
    "kernel",
    "avg_cycles",
    "total_cycles",
    "retired",
    "replays",
    "fu_busy_adder",
    "fu_busy_mul",
    "fu_busy_shift",
    "fu_busy_cmp",
    "fu_busy_move",
    "spm_lines",
    "mem_words",
    "energy_proxy",
];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Option<Format> {
        match s {
            "csv" => Some(Format::Csv),
            "json" => Some(Format::Json),
            "text" | "txt" => Some(Format::Text),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub schema_version: String,
    pub cells: Vec<SweepCell>,
    pub checks: Vec<CheckResult>,
}

fn kernel_column(cell: &SweepCell, kernel: &str) -> String {
    if cell.workload == kernel {
        kernel.to_string()
    } else {
        format!("{}:{}", cell.workload, kernel)
    }
}

/// CSV text with a header row.
pub fn to_csv(table: &SweepTable) -> Result<String, ReportError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for cell in &table.cells {
        let c = &cell.config;
        let head = [c.scheme.to_string(), c.d.to_string(), c.f.to_string(), c.m.to_string(), c.n.to_string()];
        let Some(r) = &cell.report else {
            let mut row: Vec<String> = head.to_vec();
            row.push(cell.workload.clone());
            row.resize(CSV_COLUMNS.len(), String::new());
            w.write_record(&row)?;
            continue;
        };
        let k = &r.counters;
        for a in &r.averages {
            let mut row: Vec<String> = head.to_vec();
            row.push(kernel_column(cell, &a.kernel));
            row.push(format!("{:.1}", a.avg_cycles));
            row.push(k.cycles.to_string());
            row.push(k.retired_total().to_string());
            row.push(k.replays.total().to_string());
            row.extend(k.coproc.fu_busy.iter().map(|v| v.to_string()));
            row.push((k.coproc.spm_line_reads + k.coproc.spm_line_writes).to_string());
            row.push(k.mem_words.to_string());
            row.push(format!("{:.4}", r.energy_proxy));
            w.write_record(&row)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Io {
        path: "<csv buffer>".into(),
        source: std::io::Error::other(e.to_string()),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn to_json(table: &SweepTable, checks: &[CheckResult]) -> Result<String, ReportError> {
    let doc = JsonReport { schema_version: SCHEMA_VERSION.to_string(), cells: table.cells.clone(), checks: checks.to_vec() };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Grid of average cycles: one row per configuration, one column per
/// workload kernel, followed by the trend verdicts.
pub fn to_text(table: &SweepTable, checks: &[CheckResult]) -> String {
    let mut cols: Vec<String> = Vec::new();
    let mut rows: Vec<(String, u32, String)> = Vec::new();
    for cell in &table.cells {
        let key = (cell.config.family.clone(), cell.config.d, cell.config.scheme.to_string());
        if !rows.contains(&key) {
            rows.push(key);
        }
        if let Some(r) = &cell.report {
            for a in &r.averages {
                let col = kernel_column(cell, &a.kernel);
                if !cols.contains(&col) {
                    cols.push(col);
                }
            }
        } else if !cols.contains(&cell.workload) {
            cols.push(cell.workload.clone());
        }
    }
    let mut out = String::new();
    let _ = write!(out, "{:<16} {:>2}", "configuration", "D");
    for c in &cols {
        let _ = write!(out, " {:>16}", c);
    }
    out.push('\n');
    for (family, d, scheme) in &rows {
        let _ = write!(out, "{:<16} {:>2}", family, d);
        for col in &cols {
            let v = table
                .cells
                .iter()
                .filter(|c| c.config.d == *d && c.config.scheme.to_string() == *scheme)
                .find_map(|c| {
                    if c.error.is_some() && c.workload == *col {
                        return Some("ERROR".to_string());
                    }
                    let r = c.report.as_ref()?;
                    r.averages
                        .iter()
                        .find(|a| kernel_column(c, &a.kernel) == *col)
                        .map(|a| format!("{:.0}", a.avg_cycles))
                })
                .unwrap_or_else(|| "-".to_string());
            let _ = write!(out, " {:>16}", v);
        }
        out.push('\n');
    }
    if !checks.is_empty() {
        out.push('\n');
        for c in checks {
            let _ = writeln!(out, "{}", c.line());
        }
    }
    out
}

pub fn render(table: &SweepTable, checks: &[CheckResult], format: Format) -> Result<String, ReportError> {
    match format {
        Format::Csv => to_csv(table),
        Format::Json => to_json(table, checks),
        Format::Text => Ok(to_text(table, checks)),
    }
}

/// Writes a rendered report, surfacing the path on failure.
pub fn emit_report(table: &SweepTable, checks: &[CheckResult], format: Format, path: &Path) -> Result<(), ReportError> {
    let text = render(table, checks, format)?;
    std::fs::write(path, text).map_err(|source| ReportError::Io { path: path.display().to_string(), source })
}
