//! Treat the recorded outcome as the system and bound its group metrics
//! through the auditor: `outcome distance <= 2 M̂ ε + δ`.

use std::path::PathBuf;

use ncfair::auditor::{builtin, distance_profile, RuleSet};
use ncfair::bounds::table2_row;
use ncfair::metrics::Notion;
use ncfair::report;
use ncfair::tabular::recipes::{self, CompasMode};

fn data_dir() -> PathBuf {
    std::env::var_os("NCFAIR_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn main() -> ncfair::Result<()> {
    let ds = recipes::compas(data_dir().join("compas-scores-two-years.csv"), CompasMode::Binary)?;
    let rules = RuleSet::parse_for(builtin::COMPAS_BINARY, ds.schema())?;
    let system = ds.outcome_labels()?;

    // Binary labels: every disagreement has distance 1, so ε = 1 is the
    // smallest gap that counts them all as unfair.
    let profile = distance_profile(&system, &rules.apply(&ds)?, 1.0)?;
    println!("{} of {} rows disagree with the auditor", profile.violations, ds.row_count());

    let mut rows = Vec::new();
    for notion in Notion::ALL {
        for attr in ds.schema().protected() {
            rows.push(table2_row("compas", &ds, &system, &rules, attr, notion, 1.0)?);
        }
    }
    print!("{}", report::table2_markdown(&rows));
    for r in &rows {
        println!(
            "{:>20} {:<5} δ {:+.3}  M̂ {:+.3}  distance {:+.3}  bound {:+.3}  signed {}  absolute {}",
            r.notion.to_string(), r.protected, r.delta, r.m_hat, r.outcome_distance, r.upper_bound,
            if r.satisfied { "holds" } else { "fails" },
            if r.satisfied_abs { "holds" } else { "fails" },
        );
    }
    Ok(())
}
