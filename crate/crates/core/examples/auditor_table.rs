//! Group metrics of each built-in auditor, measured against the dataset outcome.

use std::path::PathBuf;

use ncfair::auditor::{builtin, RuleSet};
use ncfair::bounds::table1_rows;
use ncfair::report;
use ncfair::tabular::recipes::{self, CompasMode};

fn data_dir() -> PathBuf {
    std::env::var_os("NCFAIR_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn main() -> ncfair::Result<()> {
    let dir = data_dir();
    let sets = [
        ("compas", recipes::compas(dir.join("compas-scores-two-years.csv"), CompasMode::Binary)?, builtin::COMPAS_BINARY),
        ("adult", recipes::adult(dir.join("adult.data"))?, builtin::ADULT),
        ("german", recipes::german(dir.join("german.data"))?, builtin::CREDIT),
    ];
    let mut rows = Vec::new();
    for (name, ds, text) in &sets {
        let rules = RuleSet::parse_for(text, ds.schema())?;
        let outputs = rules.apply(ds)?;
        rows.extend(table1_rows(name, ds, &outputs, Some(0.1))?);
    }
    print!("{}", report::table1_markdown(&rows));
    println!();
    for r in rows.iter().filter(|r| r.satisfied == Some(false)) {
        println!(
            "{} / {} / {}: {:.3} exceeds δ = 0.1 ({}/{} vs {}/{})",
            r.dataset, r.protected, r.metric, r.value,
            r.unprivileged.hits, r.unprivileged.support, r.privileged.hits, r.privileged.support
        );
    }
    Ok(())
}
