//! The `ncfair` command line.
//!
//! Every setting can come from a `key = value` config file (`--config`) and
//! be overridden by the flag of the same name. Exit codes: 0 success,
//! 1 computation error (or a brute-force violation for `synth`),
//! 2 configuration or I/O error.

mod config;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::auditor::{builtin, RuleSet};
use crate::bounds::{
    accepts, epsilon_threshold_group, epsilon_threshold_individual, table1_rows,
    table2_row_from_outputs,
};
use crate::error::{Error, Result};
use crate::metrics::{if_scan, IFScanResult, ScanOptions};
use crate::report::{self, config_hash, Format, Manifest};
use crate::synth::{adversarial_search, run_campaign, AdversarialReport, CampaignConfig, CampaignReport};
use crate::tabular::recipes::{self, CompasMode};
use crate::tabular::{load_csv, parse_schema, ColumnKind, ColumnRole, CsvOptions, PreparedDataset};

pub use config::{
    parse_config_text, parse_grid, DatasetChoice, RunConfig, DEFAULT_DELTA_GRID,
    DEFAULT_KAPPA_GRID, KEYS,
};

#[derive(Debug, Parser)]
#[command(name = "ncfair", version, about = "Audit classifiers against rule-defined auditors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Group metrics of the auditor's rule relation against the dataset outcome.
    AuditAuditor(Flags),
    /// Transfer bounds for the dataset outcome as a system judged by the auditor.
    AuditSystem(Flags),
    /// Pairwise individual-fairness scan over κ and δ grids.
    IfScan(Flags),
    /// ε thresholds under which an auditor inherits a fairness level.
    Thresholds(Flags),
    /// Brute-force campaign over small synthetic instances.
    Synth(Flags),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AuditAuditor(_) => "audit-auditor",
            Command::AuditSystem(_) => "audit-system",
            Command::IfScan(_) => "if-scan",
            Command::Thresholds(_) => "thresholds",
            Command::Synth(_) => "synth",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::AuditAuditor(f)
            | Command::AuditSystem(f)
            | Command::IfScan(f)
            | Command::Thresholds(f)
            | Command::Synth(f) => f,
        }
    }
}

/// Flags stay strings here and are validated together with config-file
/// values by [`RunConfig::from_map`].
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// `key = value` config file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// compas | adult | german | custom
    #[arg(long)]
    pub dataset: Option<String>,
    /// Raw dataset file.
    #[arg(long)]
    pub data: Option<String>,
    /// Schema file for `--dataset custom`.
    #[arg(long)]
    pub schema: Option<String>,
    /// Rule file; defaults to the built-in relation for the dataset.
    #[arg(long)]
    pub rules: Option<String>,
    #[arg(long)]
    pub epsilon: Option<String>,
    /// COMPAS outcome: binary | decile
    #[arg(long)]
    pub mode: Option<String>,
    /// Comma list of csv | json | md
    #[arg(long)]
    pub format: Option<String>,
    /// Output directory; without it results go to stdout.
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Comma list of values or start:step:end ranges.
    #[arg(long)]
    pub kappa_grid: Option<String>,
    #[arg(long)]
    pub delta_grid: Option<String>,
    /// Rows scanned exactly before seeded subsampling.
    #[arg(long)]
    pub pair_cap: Option<String>,
    /// Comma list of sp | eo | cal
    #[arg(long)]
    pub notion: Option<String>,
    /// Benchmark fairness level δ (thresholds).
    #[arg(long)]
    pub delta: Option<String>,
    /// Target fairness level δ′ (thresholds).
    #[arg(long)]
    pub delta_prime: Option<String>,
    /// Lipschitz constant M (group threshold).
    #[arg(long)]
    pub m: Option<String>,
    /// Observed noncomparative gap to accept or reject (thresholds).
    #[arg(long)]
    pub observed_epsilon: Option<String>,
    /// Synthetic instances per check.
    #[arg(long)]
    pub instances: Option<String>,
    /// Input pairs for the adversarial search (0 skips it).
    #[arg(long)]
    pub adversarial_budget: Option<String>,
    /// δ for the coarse check column of the auditor table.
    #[arg(long)]
    pub coarse_delta: Option<String>,
}

impl Flags {
    fn entries(&self) -> [(&'static str, &Option<String>); 20] {
        [
            ("dataset", &self.dataset),
            ("data", &self.data),
            ("schema", &self.schema),
            ("rules", &self.rules),
            ("epsilon", &self.epsilon),
            ("mode", &self.mode),
            ("format", &self.format),
            ("out", &self.out),
            ("seed", &self.seed),
            ("kappa-grid", &self.kappa_grid),
            ("delta-grid", &self.delta_grid),
            ("pair-cap", &self.pair_cap),
            ("notion", &self.notion),
            ("delta", &self.delta),
            ("delta-prime", &self.delta_prime),
            ("m", &self.m),
            ("observed-epsilon", &self.observed_epsilon),
            ("instances", &self.instances),
            ("adversarial-budget", &self.adversarial_budget),
            ("coarse-delta", &self.coarse_delta),
        ]
    }

    /// Config file entries with flags laid over them.
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut map: BTreeMap<String, String> = match &self.config {
            Some(path) => config::read_config_file(path)?,
            None => BTreeMap::new(),
        };
        for (k, v) in self.entries() {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        RunConfig::from_map(&map)
    }
}

/// Parses arguments, runs the command and returns the process exit code.
/// Results go to `stdout`, diagnostics to standard error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                2
            } else {
                1
            }
        }
    }
}

/// Runs a parsed command. `Ok` carries the exit code.
pub fn execute(cmd: &Command, stdout: &mut dyn Write) -> Result<i32> {
    let cfg = cmd.flags().resolve()?;
    let mut em = Emitter::new(&cfg, stdout);
    let code = match cmd {
        Command::AuditAuditor(_) => audit_auditor(&cfg, &mut em)?,
        Command::AuditSystem(_) => audit_system(&cfg, &mut em)?,
        Command::IfScan(_) => if_scan_cmd(&cfg, &mut em)?,
        Command::Thresholds(_) => thresholds(&cfg, &mut em)?,
        Command::Synth(_) => synth(&cfg, &mut em)?,
    };
    em.finish(cmd.name(), &cfg)?;
    Ok(code)
}

/// Writes rendered outputs to the output directory, or to stdout.
struct Emitter<'a> {
    out: Option<PathBuf>,
    stdout: &'a mut dyn Write,
    files: Vec<String>,
}

impl<'a> Emitter<'a> {
    fn new(cfg: &RunConfig, stdout: &'a mut dyn Write) -> Self {
        Emitter {
            out: cfg.out.clone(),
            stdout,
            files: Vec::new(),
        }
    }

    fn emit(&mut self, file: &str, contents: &str) -> Result<()> {
        match &self.out {
            Some(dir) => {
                report::write_file(dir, file, contents)?;
                self.files.push(file.to_string());
                Ok(())
            }
            None => self
                .stdout
                .write_all(contents.as_bytes())
                .map_err(|e| Error::io("<stdout>", e)),
        }
    }

    /// A human-readable line: stdout when files hold the results, else stderr.
    fn note(&mut self, line: &str) {
        if self.out.is_some() {
            let _ = writeln!(self.stdout, "{line}");
        } else {
            eprintln!("{line}");
        }
    }

    fn finish(self, command: &str, cfg: &RunConfig) -> Result<()> {
        if let Some(dir) = &self.out {
            let manifest = Manifest {
                command: command.to_string(),
                config: cfg.canonical.clone(),
                config_hash: config_hash(&format!("command = {command}\n{}", cfg.canonical)),
                seed: cfg.seed,
                files: self.files.clone(),
            };
            report::write_file(dir, "manifest.json", &report::to_json(&manifest)?)?;
        }
        Ok(())
    }
}

fn require<'a, T>(v: &'a Option<T>, key: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Config(format!("`{key}` is required for this command")))
}

struct Loaded {
    name: &'static str,
    ds: PreparedDataset,
    rules: RuleSet,
}

fn load(cfg: &RunConfig, default_mode: CompasMode) -> Result<Loaded> {
    let choice = *require(&cfg.dataset, "dataset")?;
    let data = require(&cfg.data, "data")?;
    let (ds, builtin_rules) = match choice {
        DatasetChoice::Compas => {
            let mode = cfg.mode.unwrap_or(default_mode);
            let rules = match mode {
                CompasMode::Binary => builtin::COMPAS_BINARY,
                CompasMode::Decile => builtin::COMPAS_DECILE,
            };
            (recipes::compas(data, mode)?, Some(rules))
        }
        DatasetChoice::Adult => (recipes::adult(data)?, Some(builtin::ADULT)),
        DatasetChoice::German => (recipes::german(data)?, Some(builtin::CREDIT)),
        DatasetChoice::Custom => (load_custom(cfg, data)?, None),
    };
    let text = match (&cfg.rules, builtin_rules) {
        (Some(path), _) => std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?,
        (None, Some(t)) => t.to_string(),
        (None, None) => {
            return Err(Error::Config("`rules` is required for a custom dataset".into()))
        }
    };
    let rules = RuleSet::parse_for(&text, ds.schema())?;
    Ok(Loaded {
        name: choice.name(),
        ds,
        rules,
    })
}

fn load_custom(cfg: &RunConfig, data: &PathBuf) -> Result<PreparedDataset> {
    let path = require(&cfg.schema, "schema")?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let schema = parse_schema(&text)?;
    let ds = load_csv(data, &schema, &CsvOptions::default())?;
    ds.ensure_complete()?;
    ds.ensure_favorable_present()?;
    let categorical: Vec<&str> = schema
        .columns()
        .iter()
        .filter(|c| c.kind == ColumnKind::Categorical && c.role == ColumnRole::Feature)
        .map(|c| c.name.as_str())
        .collect();
    ds.one_hot(&categorical)
}

fn audit_auditor(cfg: &RunConfig, em: &mut Emitter<'_>) -> Result<i32> {
    let l = load(cfg, CompasMode::Binary)?;
    let outputs = l.rules.apply(&l.ds)?;
    let rows: Vec<_> = table1_rows(l.name, &l.ds, &outputs, cfg.coarse_delta)?
        .into_iter()
        .filter(|r| cfg.notions.contains(&r.metric))
        .collect();
    for f in &cfg.formats {
        let body = match f {
            Format::Csv => report::table1_csv(&rows),
            Format::Md => report::table1_markdown(&rows),
            Format::Json => report::to_json(&rows)?,
        };
        em.emit(&format!("table1.{}", f.extension()), &body)?;
    }
    Ok(0)
}

fn audit_system(cfg: &RunConfig, em: &mut Emitter<'_>) -> Result<i32> {
    let l = load(cfg, CompasMode::Binary)?;
    let auditor = l.rules.apply(&l.ds)?;
    let system = l.ds.outcome_labels()?;
    let mut rows = Vec::new();
    for &notion in &cfg.notions {
        for attr in l.ds.schema().protected() {
            rows.push(table2_row_from_outputs(
                l.name,
                &l.ds,
                &system,
                &auditor,
                attr,
                notion,
                cfg.epsilon,
            )?);
        }
    }
    for f in &cfg.formats {
        let body = match f {
            Format::Csv => report::table2_csv(&rows),
            Format::Md => report::table2_markdown(&rows),
            Format::Json => report::to_json(&rows)?,
        };
        em.emit(&format!("table2.{}", f.extension()), &body)?;
    }
    Ok(0)
}

fn scan_markdown(r: &IFScanResult, deltas: &[f64]) -> String {
    let mut out = String::from("| κ \\ δ |");
    for d in deltas {
        let _ = write!(out, " {d} |");
    }
    out.push_str("\n|---|");
    for _ in deltas {
        out.push_str("---|");
    }
    out.push('\n');
    for chunk in r.cells.chunks(deltas.len()) {
        let _ = write!(out, "| {} |", chunk[0].kappa);
        for c in chunk {
            let _ = write!(out, " {} |", c.violations);
        }
        out.push('\n');
    }
    out
}

fn if_scan_cmd(cfg: &RunConfig, em: &mut Emitter<'_>) -> Result<i32> {
    let l = load(cfg, CompasMode::Decile)?;
    let outputs = l.rules.apply(&l.ds)?;
    let opts = ScanOptions {
        kappa_grid: cfg.kappa_grid.clone(),
        delta_grid: cfg.delta_grid.clone(),
        pair_cap: cfg.pair_cap,
        seed: cfg.seed,
    };
    let r = if_scan(&l.ds, &outputs, &opts)?;
    for f in &cfg.formats {
        let body = match f {
            Format::Csv => r.to_csv(),
            Format::Md => scan_markdown(&r, &cfg.delta_grid),
            Format::Json => report::to_json(&r)?,
        };
        em.emit(&format!("if_scan.{}", f.extension()), &body)?;
    }
    let satisfied = r.cells.iter().filter(|c| c.satisfied).count();
    em.note(&format!(
        "max input distance {:.4}; {satisfied} of {} cells satisfied; {} of {} rows, {} pairs",
        r.max_input_distance,
        r.cells.len(),
        r.rows_scanned,
        r.rows_total,
        r.pairs
    ));
    Ok(0)
}

#[derive(Debug, Serialize)]
struct ThresholdReport {
    delta: f64,
    delta_prime: f64,
    individual_threshold: f64,
    m: Option<f64>,
    group_threshold: Option<f64>,
    observed_epsilon: Option<f64>,
    individual_verdict: Option<&'static str>,
    group_verdict: Option<&'static str>,
}

fn verdict(observed: Option<f64>, threshold: Option<f64>) -> Option<&'static str> {
    match (observed, threshold) {
        (Some(o), Some(t)) => Some(if accepts(o, t) { "accept" } else { "reject" }),
        _ => None,
    }
}

fn thresholds(cfg: &RunConfig, em: &mut Emitter<'_>) -> Result<i32> {
    let delta = *require(&cfg.delta, "delta")?;
    let delta_prime = *require(&cfg.delta_prime, "delta-prime")?;
    let individual = epsilon_threshold_individual(delta, delta_prime)?;
    let group = cfg
        .m
        .map(|m| epsilon_threshold_group(delta, delta_prime, m))
        .transpose()?;
    let r = ThresholdReport {
        delta,
        delta_prime,
        individual_threshold: individual,
        m: cfg.m,
        group_threshold: group,
        observed_epsilon: cfg.observed_epsilon,
        individual_verdict: verdict(cfg.observed_epsilon, Some(individual)),
        group_verdict: verdict(cfg.observed_epsilon, group),
    };
    for f in &cfg.formats {
        let body = match f {
            Format::Json => report::to_json(&r)?,
            Format::Csv => {
                let mut s = String::from("notion,delta,delta_prime,m,threshold,observed_epsilon,verdict\n");
                let obs = r.observed_epsilon.map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "individual,{delta},{delta_prime},,{individual},{obs},{}",
                    r.individual_verdict.unwrap_or("")
                );
                if let (Some(m), Some(t)) = (r.m, r.group_threshold) {
                    let _ = writeln!(
                        s,
                        "group,{delta},{delta_prime},{m},{t},{obs},{}",
                        r.group_verdict.unwrap_or("")
                    );
                }
                s
            }
            Format::Md => {
                let mut s = format!("individual threshold: {individual}\n");
                if let Some(t) = group {
                    let _ = writeln!(s, "group threshold: {t}");
                }
                if let Some(v) = r.individual_verdict {
                    let _ = writeln!(s, "individual: {v}");
                }
                if let Some(v) = r.group_verdict {
                    let _ = writeln!(s, "group: {v}");
                }
                s
            }
        };
        em.emit(&format!("thresholds.{}", f.extension()), &body)?;
    }
    Ok(0)
}

#[derive(Debug, Serialize)]
struct SynthOutput {
    seed: u64,
    campaign: CampaignReport,
    adversarial: Option<AdversarialReport>,
}

fn synth(cfg: &RunConfig, em: &mut Emitter<'_>) -> Result<i32> {
    let campaign = run_campaign(&CampaignConfig {
        seed: cfg.seed,
        instances: cfg.instances,
        ..CampaignConfig::default()
    })?;
    let adversarial = (cfg.adversarial_budget > 0)
        .then(|| adversarial_search(cfg.seed, cfg.adversarial_budget))
        .transpose()?;
    let violations =
        campaign.total_violations + adversarial.as_ref().map_or(0, |a| a.violations);
    let out = SynthOutput {
        seed: cfg.seed,
        campaign,
        adversarial,
    };
    em.emit("synth.json", &report::to_json(&out)?)?;
    em.note(&format!("{violations} violations"));
    Ok(if violations == 0 { 0 } else { 1 })
}
