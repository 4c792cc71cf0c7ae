//! Mahalanobis distances on COMPAS and the (κ, δ) individual fairness grid
//! for the decile-score auditor.

use std::path::PathBuf;

use ncfair::auditor::{builtin, RuleSet};
use ncfair::metrics::{if_scan, CovarianceModel, ScanOptions};
use ncfair::tabular::recipes::{self, CompasMode};

fn data_dir() -> PathBuf {
    std::env::var_os("NCFAIR_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn main() -> ncfair::Result<()> {
    let ds = recipes::compas(data_dir().join("compas-scores-two-years.csv"), CompasMode::Decile)?;
    let model = CovarianceModel::from_dataset(&ds)?;
    println!("covariance: dim {}, rank {}, {:?}", model.dim(), model.rank(), model.method());

    let rules = RuleSet::parse_for(builtin::COMPAS_DECILE, ds.schema())?;
    let outputs = rules.apply(&ds)?;
    let kappas = vec![0.0, 0.5, 1.0, 2.0, 4.0, 9.2];
    let deltas = vec![0.0, 1.0, 3.0, 6.0, 9.0];
    let scan = if_scan(&ds, &outputs, &ScanOptions::new(kappas.clone(), deltas.clone()))?;
    println!(
        "{} rows, {} pairs, max input distance {:.3}, max output distance {}",
        scan.rows_scanned, scan.pairs, scan.max_input_distance, scan.max_output_distance
    );

    print!("{:>6}", "κ\\δ");
    for d in &deltas {
        print!("{d:>10}");
    }
    println!();
    for k in &kappas {
        print!("{k:>6}");
        for d in &deltas {
            print!("{:>10}", scan.cell(*k, *d).expect("grid cell").violations);
        }
        println!();
    }
    if let Some((i, j)) = scan.cell(1.0, 3.0).and_then(|c| c.witness) {
        println!("witness at (1, 3): rows {i} and {j}, outputs {} and {}", outputs[i], outputs[j]);
    }
    Ok(())
}
