mod common;

use ncfair::auditor::{builtin, RuleSet};
use ncfair::tabular::recipes::{self, CompasMode};
use ncfair::tabular::Cell;

macro_rules! need_data {
    () => {
        if !common::have_data() {
            eprintln!("skipping: raw data not found under {}", common::data_dir().display());
            return;
        }
    };
}

#[test]
fn row_counts() {
    need_data!();
    let raw = recipes::compas_raw(common::compas_path()).unwrap();
    assert_eq!(raw.row_count(), 7214);
    for mode in [CompasMode::Binary, CompasMode::Decile] {
        assert_eq!(recipes::compas(common::compas_path(), mode).unwrap().row_count(), 5278);
    }
    assert_eq!(recipes::adult(common::adult_path()).unwrap().row_count(), 32561);
    assert_eq!(recipes::german(common::german_path()).unwrap().row_count(), 1000);
}

#[test]
fn compas_bins_follow_age() {
    need_data!();
    let ds = recipes::compas(common::compas_path(), CompasMode::Binary).unwrap();
    let age = ds.numeric("age").unwrap().to_vec();
    let handle = ds.column("age-category").unwrap();
    let cats = handle.view();
    for (r, a) in age.iter().enumerate() {
        let expected = if *a < 25.0 { "<25" } else if *a <= 45.0 { "25-45" } else { ">45" };
        assert_eq!(cats.get(r), Cell::Text(expected), "row {r}, age {a}");
    }
}

#[test]
fn every_protected_group_is_populated() {
    need_data!();
    let sets = [
        recipes::compas(common::compas_path(), CompasMode::Binary).unwrap(),
        recipes::adult(common::adult_path()).unwrap(),
        recipes::german(common::german_path()).unwrap(),
    ];
    for ds in &sets {
        for attr in ds.schema().protected() {
            let mask = ds.privileged_mask(attr).unwrap();
            let privileged = mask.iter().filter(|&&b| b).count();
            assert!(privileged > 0 && privileged < mask.len(), "{}", attr.column);
        }
    }
}

#[test]
fn preparation_is_deterministic() {
    need_data!();
    let a = recipes::german(common::german_path()).unwrap().to_csv_string().unwrap();
    let b = recipes::german(common::german_path()).unwrap().to_csv_string().unwrap();
    assert_eq!(a, b);
}

#[test]
fn decile_rules_never_fall_through() {
    need_data!();
    let ds = recipes::compas(common::compas_path(), CompasMode::Decile).unwrap();
    let rs = RuleSet::parse_for(builtin::COMPAS_DECILE, ds.schema()).unwrap();
    let traced = rs.apply_traced(&ds).unwrap();
    assert!(traced.iter().all(Option::is_some));
    let out = rs.apply(&ds).unwrap();
    assert!(out.iter().all(|y| (1..=10).contains(y)));
}

#[test]
fn builtin_rules_fit_their_recipes() {
    need_data!();
    let pairs = [
        (recipes::compas(common::compas_path(), CompasMode::Binary).unwrap(), builtin::COMPAS_BINARY),
        (recipes::adult(common::adult_path()).unwrap(), builtin::ADULT),
        (recipes::german(common::german_path()).unwrap(), builtin::CREDIT),
    ];
    for (ds, text) in &pairs {
        let rs = RuleSet::parse_for(text, ds.schema()).unwrap();
        let fav = ds.schema().favorable_label();
        let out = rs.apply(ds).unwrap();
        assert!(out.contains(&fav), "{:?}", rs.output_name());
        assert!(out.iter().any(|&y| y != fav), "{:?}", rs.output_name());
    }
}
