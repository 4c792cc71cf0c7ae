//! Prepare the three benchmark datasets and summarise what the recipes keep.
//!
//! Raw files are read from `NCFAIR_DATA_DIR` (default: the workspace `data/`).

use std::path::PathBuf;

use ncfair::tabular::recipes::{self, CompasMode};
use ncfair::tabular::PreparedDataset;

fn data_dir() -> PathBuf {
    std::env::var_os("NCFAIR_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

fn summarise(name: &str, ds: &PreparedDataset) -> ncfair::Result<()> {
    let (features, _) = ds.feature_matrix()?;
    println!("{name}: {} rows, {} feature columns", ds.row_count(), features.len());
    println!("  outcome {} (favorable {})", ds.schema().outcome().column, ds.schema().favorable_label());
    for attr in ds.schema().protected() {
        let mask = ds.privileged_mask(attr)?;
        let privileged = mask.iter().filter(|&&b| b).count();
        println!(
            "  protected {}: {privileged} privileged ({}), {} unprivileged",
            attr.column,
            attr.privileged,
            mask.len() - privileged
        );
    }
    for enc in ds.encodings() {
        let cats: Vec<&str> = enc.dummies.iter().map(|(c, _)| c.as_str()).collect();
        println!("  one-hot {}: {}", enc.source, cats.join(", "));
    }
    Ok(())
}

fn main() -> ncfair::Result<()> {
    let dir = data_dir();
    let raw = recipes::compas_raw(dir.join("compas-scores-two-years.csv"))?;
    let keep = recipes::compas_filter(&raw)?;
    println!("compas raw: {} rows, {} pass the screening filter", raw.row_count(), keep.iter().filter(|&&k| k).count());

    summarise("compas", &recipes::compas(dir.join("compas-scores-two-years.csv"), CompasMode::Binary)?)?;
    summarise("adult", &recipes::adult(dir.join("adult.data"))?)?;
    summarise("german", &recipes::german(dir.join("german.data"))?)?;
    Ok(())
}
