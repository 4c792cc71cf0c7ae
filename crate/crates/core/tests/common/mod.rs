#![allow(dead_code)]

use std::path::PathBuf;

/// `NCFAIR_DATA_DIR`, else the workspace `data/` directory.
pub fn data_dir() -> PathBuf {
    std::env::var_os("NCFAIR_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

pub fn compas_path() -> PathBuf {
    data_dir().join("compas-scores-two-years.csv")
}

pub fn adult_path() -> PathBuf {
    data_dir().join("adult.data")
}

pub fn german_path() -> PathBuf {
    data_dir().join("german.data")
}

/// All three raw files are present.
pub fn have_data() -> bool {
    [compas_path(), adult_path(), german_path()]
        .iter()
        .all(|p| p.is_file())
}
