use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::metrics::{Notion, DEFAULT_PAIR_CAP};
use crate::report::Format;
use crate::tabular::recipes::CompasMode;

/// Keys accepted in config files and as `--key` flags.
pub const KEYS: [&str; 20] = [
    "dataset",
    "data",
    "schema",
    "rules",
    "epsilon",
    "mode",
    "format",
    "out",
    "seed",
    "kappa-grid",
    "delta-grid",
    "pair-cap",
    "notion",
    "delta",
    "delta-prime",
    "m",
    "observed-epsilon",
    "instances",
    "adversarial-budget",
    "coarse-delta",
];

pub const DEFAULT_KAPPA_GRID: &str = "0:0.5:9, 9.2";
pub const DEFAULT_DELTA_GRID: &str = "0:0.5:9";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetChoice {
    Compas,
    Adult,
    German,
    Custom,
}

impl DatasetChoice {
    pub fn name(self) -> &'static str {
        match self {
            DatasetChoice::Compas => "compas",
            DatasetChoice::Adult => "adult",
            DatasetChoice::German => "german",
            DatasetChoice::Custom => "custom",
        }
    }
}

impl FromStr for DatasetChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compas" => Ok(DatasetChoice::Compas),
            "adult" => Ok(DatasetChoice::Adult),
            "german" => Ok(DatasetChoice::German),
            "custom" => Ok(DatasetChoice::Custom),
            other => Err(Error::Config(format!(
                "unknown dataset `{other}` (compas|adult|german|custom)"
            ))),
        }
    }
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<DatasetChoice>,
    pub data: Option<PathBuf>,
    pub schema: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub epsilon: f64,
    pub mode: Option<CompasMode>,
    pub formats: Vec<Format>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub kappa_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    pub pair_cap: usize,
    pub notions: Vec<Notion>,
    pub delta: Option<f64>,
    pub delta_prime: Option<f64>,
    pub m: Option<f64>,
    pub observed_epsilon: Option<f64>,
    pub instances: usize,
    pub adversarial_budget: u64,
    /// δ for the coarse check column of the auditor table.
    pub coarse_delta: Option<f64>,
    /// `key = value` lines, sorted, that produced this config.
    pub canonical: String,
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("config line {}: expected `key = value`", i + 1))
        })?;
        let k = k.trim().replace('_', "-");
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::Config(format!("config line {}: unknown key `{k}`", i + 1)));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_text(&text)
}

/// Comma list whose items are numbers or `start:step:end` ranges.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = |item: &str| Error::Config(format!("bad grid item `{item}`"));
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [v] => out.push(v.parse().map_err(|_| bad(item))?),
            [a, s, b] => {
                let (a, s, b): (f64, f64, f64) = (
                    a.parse().map_err(|_| bad(item))?,
                    s.parse().map_err(|_| bad(item))?,
                    b.parse().map_err(|_| bad(item))?,
                );
                if s.is_nan() || s <= 0.0 || b < a {
                    return Err(bad(item));
                }
                let steps = ((b - a) / s + 1e-9).floor() as u64;
                // Round away accumulated binary error so 0.1-steps print cleanly.
                out.extend((0..=steps).map(|k| ((a + k as f64 * s) * 1e9).round() / 1e9));
            }
            _ => return Err(bad(item)),
        }
    }
    if out.is_empty() {
        return Err(Error::Config("grid is empty".into()));
    }
    Ok(out)
}

fn parse_list<T: FromStr<Err = Error>>(text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect()
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("`{key}` expects a number, got `{v}`")))
}

impl RunConfig {
    /// Builds the config from merged settings (flags already laid over the
    /// file).
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let opt_num = |k: &str| get(k).map(|v| num::<f64>(k, v)).transpose();
        let epsilon = opt_num("epsilon")?.unwrap_or(1.0);
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
        }
        let mut canonical = String::new();
        for (k, v) in map {
            let _ = writeln!(canonical, "{k} = {v}");
        }
        Ok(RunConfig {
            dataset: get("dataset").map(str::parse).transpose()?,
            data: get("data").map(PathBuf::from),
            schema: get("schema").map(PathBuf::from),
            rules: get("rules").map(PathBuf::from),
            epsilon,
            mode: get("mode").map(str::parse).transpose()?,
            formats: parse_list(get("format").unwrap_or("csv"))?,
            out: get("out").map(PathBuf::from),
            seed: get("seed").map(|v| num("seed", v)).transpose()?.unwrap_or(0),
            kappa_grid: parse_grid(get("kappa-grid").unwrap_or(DEFAULT_KAPPA_GRID))?,
            delta_grid: parse_grid(get("delta-grid").unwrap_or(DEFAULT_DELTA_GRID))?,
            pair_cap: get("pair-cap")
                .map(|v| num("pair-cap", v))
                .transpose()?
                .unwrap_or(DEFAULT_PAIR_CAP),
            notions: match get("notion") {
                Some(v) => parse_list(v)?,
                None => Notion::ALL.to_vec(),
            },
            delta: opt_num("delta")?,
            delta_prime: opt_num("delta-prime")?,
            m: opt_num("m")?,
            observed_epsilon: opt_num("observed-epsilon")?,
            instances: get("instances")
                .map(|v| num("instances", v))
                .transpose()?
                .unwrap_or(1000),
            adversarial_budget: get("adversarial-budget")
                .map(|v| num("adversarial-budget", v))
                .transpose()?
                .unwrap_or(0),
            coarse_delta: opt_num("coarse-delta")?,
            canonical,
        })
    }
}
