//! Rendering of tables and reports as CSV, Markdown and JSON.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::bounds::{AuditorMetricRow, TransferBoundReport};
use crate::error::{Error, Result};
use crate::metrics::Notion;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Md,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Md => "md",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Md),
            other => Err(Error::Config(format!("unknown format `{other}` (csv|json|md)"))),
        }
    }
}

/// Hex SHA-256 of a canonical configuration text.
pub fn config_hash(canonical: &str) -> String {
    Sha256::digest(canonical.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_bool(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

fn csv_num(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn table1_csv(rows: &[AuditorMetricRow]) -> String {
    let mut out = String::from(
        "dataset,metric,protected,value,delta,satisfied,\
         unprivileged_hits,unprivileged_support,privileged_hits,privileged_support\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.metric.metric_name(),
            r.protected,
            r.value,
            csv_num(r.delta),
            csv_bool(r.satisfied),
            r.unprivileged.hits,
            r.unprivileged.support,
            r.privileged.hits,
            r.privileged.support
        );
    }
    out
}

/// Columns in first-seen `(dataset, protected)` order.
fn table_columns<'a>(keys: impl Iterator<Item = (&'a str, &'a str)>) -> Vec<(&'a str, &'a str)> {
    let mut cols = Vec::new();
    for k in keys {
        if !cols.contains(&k) {
            cols.push(k);
        }
    }
    cols
}

fn md_header(cols: &[(&str, &str)]) -> String {
    let mut s = String::from("| Metric |");
    for (d, p) in cols {
        let _ = write!(s, " {d} ({p}) |");
    }
    s.push_str("\n|---|");
    for _ in cols {
        s.push_str("---|");
    }
    s.push('\n');
    s
}

pub fn table1_markdown(rows: &[AuditorMetricRow]) -> String {
    let cols = table_columns(rows.iter().map(|r| (r.dataset.as_str(), r.protected.as_str())));
    let mut out = md_header(&cols);
    for notion in Notion::ALL {
        if !rows.iter().any(|r| r.metric == notion) {
            continue;
        }
        let _ = write!(out, "| {notion} |");
        for (d, p) in &cols {
            match rows
                .iter()
                .find(|r| r.metric == notion && r.dataset == *d && r.protected == *p)
            {
                Some(r) => {
                    let _ = write!(out, " {:.3} |", r.value);
                }
                None => out.push_str(" |"),
            }
        }
        out.push('\n');
    }
    out
}

pub fn table2_csv(rows: &[TransferBoundReport]) -> String {
    let mut out = String::from(
        "dataset,notion,protected,epsilon,delta,m_hat,outcome_distance,upper_bound,\
         abs_outcome_distance,abs_upper_bound,satisfied,satisfied_abs,\
         system_unprivileged_hits,system_unprivileged_support,\
         system_privileged_hits,system_privileged_support,\
         auditor_unprivileged_hits,auditor_unprivileged_support,\
         auditor_privileged_hits,auditor_privileged_support\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.dataset,
            r.notion.code(),
            r.protected,
            r.epsilon,
            r.delta,
            r.m_hat,
            r.outcome_distance,
            r.upper_bound,
            r.outcome_distance.abs(),
            r.upper_bound.abs(),
            r.satisfied,
            r.satisfied_abs,
            r.system_unprivileged.hits,
            r.system_unprivileged.support,
            r.system_privileged.hits,
            r.system_privileged.support,
            r.auditor_unprivileged.hits,
            r.auditor_unprivileged.support,
            r.auditor_privileged.hits,
            r.auditor_privileged.support
        );
    }
    out
}

/// Cells read `(outcome distance, upper bound)`, followed by the verdict.
pub fn table2_markdown(rows: &[TransferBoundReport]) -> String {
    let cols = table_columns(rows.iter().map(|r| (r.dataset.as_str(), r.protected.as_str())));
    let mut out = md_header(&cols);
    for notion in Notion::ALL {
        if !rows.iter().any(|r| r.notion == notion) {
            continue;
        }
        let _ = write!(out, "| {notion} |");
        for (d, p) in &cols {
            match rows
                .iter()
                .find(|r| r.notion == notion && r.dataset == *d && r.protected == *p)
            {
                Some(r) => {
                    let _ = write!(
                        out,
                        " ({:.3}, {:.3}) {} |",
                        r.outcome_distance,
                        r.upper_bound,
                        if r.satisfied { "holds" } else { "fails" }
                    );
                }
                None => out.push_str(" |"),
            }
        }
        out.push('\n');
    }
    out
}

/// Provenance written next to every set of outputs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub command: String,
    pub config: String,
    pub config_hash: String,
    pub seed: u64,
    pub files: Vec<String>,
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))
}
