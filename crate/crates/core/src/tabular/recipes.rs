//! Preparation recipes for the COMPAS, Adult and German credit datasets.
//!
//! Raw files are not bundled with the library; pass the path of
//!
//! * `compas-scores-two-years.csv` from ProPublica's `compas-analysis`
//!   repository,
//! * `adult.data` from the UCI Adult (Census Income) dataset,
//! * `german.data` from the UCI Statlog (German Credit Data) dataset.
//!
//! Every recipe is deterministic: the same input bytes give the same table.

use std::path::Path;
use std::str::FromStr;

use super::{
    load_csv, BinSpec, ColumnData, ColumnKind, ColumnRole, ColumnSpec, CsvOptions, HeaderMode,
    OutcomeSpec, PreparedDataset, ProtectedAttribute, Schema,
};
use crate::error::{Error, Result};

/// Which COMPAS column plays the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompasMode {
    /// `two-year-recid`, favorable outcome 0.
    Binary,
    /// `decile-score` (1..=10), favorable outcome 1.
    Decile,
}

impl FromStr for CompasMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(CompasMode::Binary),
            "decile" => Ok(CompasMode::Decile),
            other => Err(Error::Config(format!("unknown mode `{other}` (binary|decile)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Recipe {
    Compas(CompasMode),
    Adult,
    German,
}

impl Recipe {
    pub fn prepare(self, raw_path: impl AsRef<Path>) -> Result<PreparedDataset> {
        match self {
            Recipe::Compas(mode) => compas(raw_path, mode),
            Recipe::Adult => adult(raw_path),
            Recipe::German => german(raw_path),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Recipe::Compas(_) => "compas",
            Recipe::Adult => "adult",
            Recipe::German => "german",
        }
    }
}

fn protected(column: &str, privileged: &str) -> ProtectedAttribute {
    ProtectedAttribute {
        column: column.into(),
        privileged: privileged.into(),
    }
}

fn outcome(column: &str, favorable: &str) -> OutcomeSpec {
    OutcomeSpec {
        column: column.into(),
        favorable: favorable.into(),
    }
}

fn map_codes(values: &[String], column: &str, table: &[(&str, &str)]) -> Result<Vec<String>> {
    values
        .iter()
        .enumerate()
        .map(|(row, v)| {
            table
                .iter()
                .find(|(code, _)| code == v)
                .map(|(_, out)| out.to_string())
                .ok_or_else(|| Error::Parse {
                    row,
                    column: column.into(),
                    message: format!("unexpected code `{v}`"),
                })
        })
        .collect()
}

fn map_numeric_codes(values: &[String], column: &str, table: &[(&str, f64)]) -> Result<Vec<f64>> {
    values
        .iter()
        .enumerate()
        .map(|(row, v)| {
            table
                .iter()
                .find(|(code, _)| code == v)
                .map(|(_, x)| *x)
                .ok_or_else(|| Error::Parse {
                    row,
                    column: column.into(),
                    message: format!("unexpected code `{v}`"),
                })
        })
        .collect()
}

// --- COMPAS ---------------------------------------------------------------

/// ProPublica age categories: under 25, 25 to 45 inclusive, over 45.
pub fn compas_age_bins() -> BinSpec {
    BinSpec::new(
        "age",
        vec![f64::NEG_INFINITY, 24.0, 45.0, f64::INFINITY],
        vec!["<25", "25-45", ">45"],
    )
    .expect("static bins")
    .into_column("age-category", ColumnRole::Feature)
}

/// Prior-offence groups 0, 1-3, 4-7, 8-15, 16-24, >24.
pub fn compas_priors_bins() -> BinSpec {
    BinSpec::new(
        "priors-count",
        vec![f64::NEG_INFINITY, 0.0, 3.0, 7.0, 15.0, 24.0, f64::INFINITY],
        vec!["0", "1-3", "4-7", "8-15", "16-24", ">24"],
    )
    .expect("static bins")
    .into_column("priors-group", ColumnRole::Auxiliary)
}

fn compas_raw_schema() -> Schema {
    use ColumnKind::*;
    Schema::new(
        vec![
            ColumnSpec::feature("sex", Categorical),
            ColumnSpec::feature("age", Numeric),
            ColumnSpec::feature("race", Categorical),
            ColumnSpec::feature("priors_count", Numeric),
            ColumnSpec::feature("c_charge_degree", Categorical),
            ColumnSpec::auxiliary("days_b_screening_arrest", Numeric),
            ColumnSpec::auxiliary("is_recid", Numeric),
            ColumnSpec::auxiliary("score_text", Categorical),
            ColumnSpec::auxiliary("decile_score", Numeric),
            ColumnSpec::auxiliary("two_year_recid", Binary),
        ],
        vec![protected("sex", "Female"), protected("race", "Caucasian")],
        outcome("two_year_recid", "0"),
    )
    .expect("static schema")
}

/// The unfiltered ProPublica table, restricted to the columns the recipe uses.
pub fn compas_raw(raw_path: impl AsRef<Path>) -> Result<PreparedDataset> {
    load_csv(raw_path, &compas_raw_schema(), &CsvOptions::default())
}

/// ProPublica's screening filter plus the two-race restriction.
pub fn compas_filter(raw: &PreparedDataset) -> Result<Vec<bool>> {
    let days = raw.numeric("days_b_screening_arrest")?;
    let is_recid = raw.numeric("is_recid")?;
    let charge = raw.text("c_charge_degree")?;
    let score = raw.text("score_text")?;
    let race = raw.text("race")?;
    Ok((0..raw.row_count())
        .map(|r| {
            (-30.0..=30.0).contains(&days[r])
                && is_recid[r] != -1.0
                && charge[r] != "O"
                && score[r] != "N/A"
                && (race[r] == "African-American" || race[r] == "Caucasian")
        })
        .collect())
}

pub fn compas(raw_path: impl AsRef<Path>, mode: CompasMode) -> Result<PreparedDataset> {
    let raw = compas_raw(raw_path)?;
    let kept = raw.retain_rows(&compas_filter(&raw)?)?;

    use ColumnKind::*;
    // Both score columns stay auxiliary; the mode only picks the outcome.
    let out = match mode {
        CompasMode::Binary => outcome("two-year-recid", "0"),
        CompasMode::Decile => outcome("decile-score", "1"),
    };
    let schema = Schema::new(
        vec![
            ColumnSpec::feature("sex", Categorical),
            ColumnSpec::feature("race", Categorical),
            ColumnSpec::auxiliary("age", Numeric),
            ColumnSpec::feature("priors-count", Numeric),
            ColumnSpec::feature("charge-degree", Categorical),
            ColumnSpec::auxiliary("two-year-recid", Binary),
            ColumnSpec::auxiliary("decile-score", Numeric),
        ],
        vec![protected("sex", "Female"), protected("race", "Caucasian")],
        out,
    )?;
    let text = |n: &str| kept.text(n).map(|v| ColumnData::Text(v.to_vec()));
    let num = |n: &str| kept.numeric(n).map(|v| ColumnData::Numeric(v.to_vec()));
    let ds = PreparedDataset::from_columns(
        schema,
        vec![
            text("sex")?,
            text("race")?,
            num("age")?,
            num("priors_count")?,
            text("c_charge_degree")?,
            num("two_year_recid")?,
            num("decile_score")?,
        ],
    )?
    .bin_numeric(&compas_age_bins())?
    .bin_numeric(&compas_priors_bins())?
    .one_hot(&["sex", "race", "age-category", "charge-degree"])?;
    ds.ensure_complete()?;
    ds.ensure_favorable_present()?;
    Ok(ds)
}

// --- Adult ----------------------------------------------------------------

const ADULT_COLUMNS: [&str; 15] = [
    "age",
    "workclass",
    "fnlwgt",
    "education",
    "education-num",
    "marital-status",
    "occupation",
    "relationship",
    "race",
    "sex",
    "capital-gain",
    "capital-loss",
    "hours-per-week",
    "native-country",
    "income",
];

/// Decades 0-10, 11-20, ..., 81-90, then >90.
pub fn adult_age_bins() -> BinSpec {
    let mut edges: Vec<f64> = (0..=9).map(|d| f64::from(d) * 10.0).collect();
    edges.push(f64::INFINITY);
    let mut labels: Vec<String> = vec!["0-10".into()];
    labels.extend((1..9).map(|d| format!("{}-{}", d * 10 + 1, d * 10 + 10)));
    labels.push(">90".into());
    BinSpec::new("age", edges, labels)
        .expect("static bins")
        .into_column("age-group", ColumnRole::Feature)
}

pub fn adult(raw_path: impl AsRef<Path>) -> Result<PreparedDataset> {
    use ColumnKind::*;
    let raw_schema = Schema::new(
        vec![
            ColumnSpec::feature("age", Numeric),
            ColumnSpec::feature("education", Categorical),
            ColumnSpec::feature("race", Categorical),
            ColumnSpec::feature("sex", Categorical),
            ColumnSpec::auxiliary("income", Categorical),
            ColumnSpec::auxiliary("fnlwgt", Numeric),
        ],
        vec![],
        outcome("fnlwgt", "0"),
    )?;
    let opts = CsvOptions {
        delimiter: b',',
        header: HeaderMode::Absent(ADULT_COLUMNS.iter().map(|s| s.to_string()).collect()),
    };
    let raw = load_csv(raw_path, &raw_schema, &opts)?;

    let race: Vec<f64> = raw
        .text("race")?
        .iter()
        .map(|r| if r == "White" { 1.0 } else { 0.0 })
        .collect();
    let income: Vec<f64> = raw
        .text("income")?
        .iter()
        .enumerate()
        .map(|(row, v)| match v.trim_end_matches('.') {
            ">50K" => Ok(1.0),
            "<=50K" => Ok(0.0),
            other => Err(Error::Parse {
                row,
                column: "income".into(),
                message: format!("unexpected income `{other}`"),
            }),
        })
        .collect::<Result<_>>()?;

    let schema = Schema::new(
        vec![
            ColumnSpec::auxiliary("age", Numeric),
            ColumnSpec::feature("sex", Categorical),
            ColumnSpec::feature("race", Binary),
            ColumnSpec::feature("education", Categorical),
            ColumnSpec::auxiliary("income", Binary),
        ],
        vec![protected("sex", "Male"), protected("race", "1")],
        outcome("income", "1"),
    )?;
    let ds = PreparedDataset::from_columns(
        schema,
        vec![
            ColumnData::Numeric(raw.numeric("age")?.to_vec()),
            ColumnData::Text(raw.text("sex")?.to_vec()),
            ColumnData::Numeric(race),
            ColumnData::Text(raw.text("education")?.to_vec()),
            ColumnData::Numeric(income),
        ],
    )?
    .bin_numeric(&adult_age_bins())?
    .one_hot(&["sex", "age-group", "education"])?;
    ds.ensure_complete()?;
    ds.ensure_favorable_present()?;
    Ok(ds)
}

// --- German credit ----------------------------------------------------------

const GERMAN_COLUMNS: [&str; 21] = [
    "status",
    "duration",
    "credit_history",
    "purpose",
    "credit_amount",
    "savings",
    "employment",
    "installment_rate",
    "personal_status",
    "other_debtors",
    "residence_since",
    "property",
    "age",
    "installment_plans",
    "housing",
    "existing_credits",
    "job",
    "people_liable",
    "telephone",
    "foreign_worker",
    "credit",
];

/// Credit history codes. A30 and A31 both describe credits paid back duly.
pub const GERMAN_CREDIT_HISTORY: [(&str, &str); 5] = [
    ("A30", "Paid"),
    ("A31", "Paid"),
    ("A32", "Existing"),
    ("A33", "Delayed"),
    ("A34", "Critical"),
];

/// Savings codes as a representative balance in DM (range midpoint; the
/// open-ended top range uses its lower bound; unknown/none is 0).
pub const GERMAN_SAVINGS_DM: [(&str, f64); 5] = [
    ("A61", 50.0),
    ("A62", 300.0),
    ("A63", 750.0),
    ("A64", 1000.0),
    ("A65", 0.0),
];

/// Employment duration codes as representative years, same convention.
pub const GERMAN_EMPLOYMENT_YEARS: [(&str, f64); 5] = [
    ("A71", 0.0),
    ("A72", 0.5),
    ("A73", 2.5),
    ("A74", 5.5),
    ("A75", 7.0),
];

pub const GERMAN_PERSONAL_STATUS: [(&str, &str); 5] = [
    ("A91", "male-divorced"),
    ("A92", "female-divorced-married"),
    ("A93", "male-single"),
    ("A94", "male-married-widowed"),
    ("A95", "female-single"),
];

/// Young below 26, old from 26 (integer ages).
pub fn german_age_bins() -> BinSpec {
    BinSpec::new(
        "age",
        vec![f64::NEG_INFINITY, 25.0, f64::INFINITY],
        vec!["young", "old"],
    )
    .expect("static bins")
}

pub fn german(raw_path: impl AsRef<Path>) -> Result<PreparedDataset> {
    use ColumnKind::*;
    let raw_schema = Schema::new(
        vec![
            ColumnSpec::feature("credit_history", Categorical),
            ColumnSpec::feature("savings", Categorical),
            ColumnSpec::feature("employment", Categorical),
            ColumnSpec::feature("personal_status", Categorical),
            ColumnSpec::feature("age", Numeric),
            ColumnSpec::auxiliary("credit", Numeric),
        ],
        vec![],
        outcome("credit", "1"),
    )?;
    let opts = CsvOptions {
        delimiter: b' ',
        header: HeaderMode::Absent(GERMAN_COLUMNS.iter().map(|s| s.to_string()).collect()),
    };
    let raw = load_csv(raw_path, &raw_schema, &opts)?;

    let status = map_codes(raw.text("personal_status")?, "personal_status", &GERMAN_PERSONAL_STATUS)?;
    let sex: Vec<String> = status
        .iter()
        .map(|s| s.split('-').next().unwrap_or_default().to_string())
        .collect();

    let schema = Schema::new(
        vec![
            ColumnSpec::feature("credit-history", Categorical),
            ColumnSpec::feature("savings", Numeric),
            ColumnSpec::feature("employment", Numeric),
            ColumnSpec::feature("personal-status", Categorical),
            ColumnSpec::feature("sex", Categorical),
            ColumnSpec::feature("age", Numeric),
            ColumnSpec::auxiliary("credit", Numeric),
        ],
        vec![protected("sex", "male"), protected("age", "old")],
        outcome("credit", "1"),
    )?;
    let ds = PreparedDataset::from_columns(
        schema,
        vec![
            ColumnData::Text(map_codes(
                raw.text("credit_history")?,
                "credit_history",
                &GERMAN_CREDIT_HISTORY,
            )?),
            ColumnData::Numeric(map_numeric_codes(raw.text("savings")?, "savings", &GERMAN_SAVINGS_DM)?),
            ColumnData::Numeric(map_numeric_codes(
                raw.text("employment")?,
                "employment",
                &GERMAN_EMPLOYMENT_YEARS,
            )?),
            ColumnData::Text(status),
            ColumnData::Text(sex),
            ColumnData::Numeric(raw.numeric("age")?.to_vec()),
            ColumnData::Numeric(raw.numeric("credit")?.to_vec()),
        ],
    )?
    .bin_numeric(&german_age_bins())?
    .one_hot(&["credit-history", "personal-status", "sex", "age"])?;
    ds.ensure_complete()?;
    ds.ensure_favorable_present()?;
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use std::io::Write;

    use super::*;

    #[test]
    fn german_age_boundary() {
        let bins = german_age_bins();
        assert_eq!(bins.labels()[bins.bin_of(25.0).unwrap()], "young");
        assert_eq!(bins.labels()[bins.bin_of(26.0).unwrap()], "old");
    }

    #[test]
    fn compas_priors_groups() {
        let bins = compas_priors_bins();
        let label = |v: f64| bins.labels()[bins.bin_of(v).unwrap()].clone();
        assert_eq!(label(0.0), "0");
        assert_eq!(label(1.0), "1-3");
        assert_eq!(label(3.0), "1-3");
        assert_eq!(label(4.0), "4-7");
        assert_eq!(label(7.0), "4-7");
        assert_eq!(label(15.0), "8-15");
        assert_eq!(label(16.0), "16-24");
        assert_eq!(label(25.0), ">24");
    }

    #[test]
    fn compas_age_categories_match_propublica() {
        let bins = compas_age_bins();
        let label = |v: f64| bins.labels()[bins.bin_of(v).unwrap()].clone();
        assert_eq!(label(24.0), "<25");
        assert_eq!(label(25.0), "25-45");
        assert_eq!(label(45.0), "25-45");
        assert_eq!(label(46.0), ">45");
    }

    #[test]
    fn adult_decades() {
        let bins = adult_age_bins();
        let label = |v: f64| bins.labels()[bins.bin_of(v).unwrap()].clone();
        assert_eq!(label(10.0), "0-10");
        assert_eq!(label(17.0), "11-20");
        assert_eq!(label(90.0), "81-90");
        assert_eq!(label(91.0), ">90");
    }

    #[test]
    fn compas_without_propublica_columns_is_schema_error() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "id,sex,age\n1,Male,30").unwrap();
        let err = compas(f.path(), CompasMode::Binary).unwrap_err();
        assert!(matches!(err, Error::Schema(_)), "{err}");
    }

    #[test]
    fn german_rejects_unknown_codes() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(
            f,
            "A11 6 A39 A43 1169 A65 A75 4 A93 A101 4 A121 67 A143 A152 2 A173 1 A192 A201 1"
        )
        .unwrap();
        assert!(matches!(german(f.path()), Err(Error::Parse { row: 0, .. })));
    }
}
