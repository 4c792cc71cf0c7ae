//! Tabular datasets: schema, CSV ingestion, categorical encoding and the
//! preparation recipes for the three public benchmark datasets.
//!
//! A [`PreparedDataset`] keeps two views of its data. The logical view is the
//! [`Schema`]: one entry per source column with its kind. The physical view
//! is the list of stored columns, where a one-hot encoded source column is
//! replaced by its dummy columns. Lookups by logical name decode dummies back
//! to the original category so rule files can keep referring to `sex` or
//! `charge-degree` after encoding.

mod csv_io;
mod encode;
pub mod recipes;
mod schema_text;

use std::borrow::Cow;
use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::Label;

pub use csv_io::{load_csv, CsvOptions, HeaderMode};
pub use encode::BinSpec;
pub use schema_text::parse_schema;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Numeric,
    Binary,
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnKind::Categorical => "categorical",
            ColumnKind::Numeric => "numeric",
            ColumnKind::Binary => "binary",
        })
    }
}

/// Whether a column enters the feature matrix used for input distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnRole {
    Feature,
    /// Carried along for rules and reporting but excluded from distances.
    Auxiliary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    pub role: ColumnRole,
}

impl ColumnSpec {
    pub fn feature(name: impl Into<String>, kind: ColumnKind) -> Self {
        ColumnSpec {
            name: name.into(),
            kind,
            role: ColumnRole::Feature,
        }
    }

    pub fn auxiliary(name: impl Into<String>, kind: ColumnKind) -> Self {
        ColumnSpec {
            name: name.into(),
            kind,
            role: ColumnRole::Auxiliary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtectedAttribute {
    pub column: String,
    pub privileged: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeSpec {
    pub column: String,
    pub favorable: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schema {
    columns: Vec<ColumnSpec>,
    protected: Vec<ProtectedAttribute>,
    outcome: OutcomeSpec,
}

impl Schema {
    pub fn new(
        columns: Vec<ColumnSpec>,
        protected: Vec<ProtectedAttribute>,
        outcome: OutcomeSpec,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(Error::Schema(format!("duplicate column `{}`", c.name)));
            }
        }
        for p in &protected {
            if !seen.contains(p.column.as_str()) {
                return Err(Error::Schema(format!(
                    "protected column `{}` is not declared",
                    p.column
                )));
            }
        }
        let out = columns
            .iter()
            .find(|c| c.name == outcome.column)
            .ok_or_else(|| {
                Error::Schema(format!("outcome column `{}` is not declared", outcome.column))
            })?;
        if out.kind == ColumnKind::Categorical {
            return Err(Error::Schema(format!(
                "outcome column `{}` must be numeric or binary",
                outcome.column
            )));
        }
        parse_label(&outcome.favorable).ok_or_else(|| {
            Error::Schema(format!(
                "favorable value `{}` is not an integer label",
                outcome.favorable
            ))
        })?;
        Ok(Schema {
            columns,
            protected,
            outcome,
        })
    }

    pub fn columns(&self) -> &[ColumnSpec] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&ColumnSpec> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn protected(&self) -> &[ProtectedAttribute] {
        &self.protected
    }

    pub fn outcome(&self) -> &OutcomeSpec {
        &self.outcome
    }

    pub fn favorable_label(&self) -> Label {
        parse_label(&self.outcome.favorable).expect("validated at construction")
    }
}

fn parse_label(s: &str) -> Option<Label> {
    let v: f64 = s.trim().parse().ok()?;
    (v.fract() == 0.0 && v.is_finite()).then_some(v as Label)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    /// `NaN` marks a missing cell.
    Numeric(Vec<f64>),
    /// The empty string marks a missing cell.
    Text(Vec<String>),
}

impl ColumnData {
    fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }

    fn select(&self, rows: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Text(v) => ColumnData::Text(rows.iter().map(|&r| v[r].clone()).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub data: ColumnData,
}

/// Dummy columns generated for one categorical source column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneHotEncoding {
    pub source: String,
    /// `(category, dummy column name)` in first-seen order.
    pub dummies: Vec<(String, String)>,
}

/// A single cell as seen through the logical schema.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell<'a> {
    Number(f64),
    Text(&'a str),
}

impl fmt::Display for Cell<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Number(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// Borrowed access to one logical column.
#[derive(Debug, Clone, Copy)]
pub enum ColumnView<'a> {
    Numeric(&'a [f64]),
    Text(&'a [String]),
    Encoded {
        encoding: &'a OneHotEncoding,
        dummies: &'a [&'a [f64]],
    },
}

impl<'a> ColumnView<'a> {
    pub fn get(&self, row: usize) -> Cell<'a> {
        match *self {
            ColumnView::Numeric(v) => Cell::Number(v[row]),
            ColumnView::Text(v) => Cell::Text(&v[row]),
            ColumnView::Encoded { encoding, dummies } => {
                let hot = dummies
                    .iter()
                    .position(|d| d[row] == 1.0)
                    .expect("one-hot rows have exactly one active dummy");
                Cell::Text(&encoding.dummies[hot].0)
            }
        }
    }
}

/// Owned handle that can hand out a [`ColumnView`].
pub struct ColumnHandle<'a> {
    kind: HandleKind<'a>,
}

enum HandleKind<'a> {
    Numeric(&'a [f64]),
    Text(&'a [String]),
    Encoded(&'a OneHotEncoding, Vec<&'a [f64]>),
}

impl<'a> ColumnHandle<'a> {
    pub fn view(&self) -> ColumnView<'_> {
        match &self.kind {
            HandleKind::Numeric(v) => ColumnView::Numeric(v),
            HandleKind::Text(v) => ColumnView::Text(v),
            HandleKind::Encoded(enc, d) => ColumnView::Encoded {
                encoding: enc,
                dummies: d,
            },
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self.kind, HandleKind::Numeric(_))
    }
}

/// Encoded tabular data plus its protected-attribute and outcome annotations.
///
/// Immutable once built; every transformation returns a new dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedDataset {
    schema: Schema,
    columns: Vec<Column>,
    encodings: Vec<OneHotEncoding>,
    row_count: usize,
}

impl PreparedDataset {
    /// Builds a dataset from columns given in schema order.
    pub fn from_columns(schema: Schema, data: Vec<ColumnData>) -> Result<Self> {
        if data.len() != schema.columns.len() {
            return Err(Error::Schema(format!(
                "{} columns supplied for a schema of {}",
                data.len(),
                schema.columns.len()
            )));
        }
        let row_count = data.first().map_or(0, ColumnData::len);
        let mut columns = Vec::with_capacity(data.len());
        for (spec, d) in schema.columns.iter().zip(data) {
            if d.len() != row_count {
                return Err(Error::LengthMismatch {
                    left: row_count,
                    right: d.len(),
                });
            }
            match (&d, spec.kind) {
                (ColumnData::Text(_), ColumnKind::Categorical) => {}
                (ColumnData::Numeric(v), ColumnKind::Binary) => {
                    if let Some(row) = v.iter().position(|x| !(x.is_nan() || *x == 0.0 || *x == 1.0)) {
                        return Err(Error::Parse {
                            row,
                            column: spec.name.clone(),
                            message: format!("binary column holds {}", v[row]),
                        });
                    }
                }
                (ColumnData::Numeric(_), ColumnKind::Numeric) => {}
                _ => {
                    return Err(Error::Type(format!(
                        "column `{}` data does not match its {} kind",
                        spec.name, spec.kind
                    )))
                }
            }
            columns.push(Column {
                name: spec.name.clone(),
                data: d,
            });
        }
        Ok(PreparedDataset {
            schema,
            columns,
            encodings: Vec::new(),
            row_count,
        })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn is_empty(&self) -> bool {
        self.row_count == 0
    }

    /// Stored columns, with dummies in place of encoded sources.
    pub fn physical_columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn encodings(&self) -> &[OneHotEncoding] {
        &self.encodings
    }

    pub fn encoding(&self, source: &str) -> Option<&OneHotEncoding> {
        self.encodings.iter().find(|e| e.source == source)
    }

    fn physical(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    /// Access a column by logical name, decoding one-hot dummies if needed.
    pub fn column(&self, name: &str) -> Result<ColumnHandle<'_>> {
        if let Some(c) = self.physical(name) {
            let kind = match &c.data {
                ColumnData::Numeric(v) => HandleKind::Numeric(v),
                ColumnData::Text(v) => HandleKind::Text(v),
            };
            return Ok(ColumnHandle { kind });
        }
        if let Some(enc) = self.encoding(name) {
            let dummies = enc
                .dummies
                .iter()
                .map(|(_, dummy)| match &self.physical(dummy).expect("dummy stored").data {
                    ColumnData::Numeric(v) => v.as_slice(),
                    ColumnData::Text(_) => unreachable!("dummies are numeric"),
                })
                .collect();
            return Ok(ColumnHandle {
                kind: HandleKind::Encoded(enc, dummies),
            });
        }
        Err(Error::UnknownColumn(name.to_string()))
    }

    pub fn numeric(&self, name: &str) -> Result<&[f64]> {
        match &self.physical(name).ok_or_else(|| Error::UnknownColumn(name.into()))?.data {
            ColumnData::Numeric(v) => Ok(v),
            ColumnData::Text(_) => Err(Error::Type(format!("column `{name}` is not numeric"))),
        }
    }

    pub fn text(&self, name: &str) -> Result<&[String]> {
        match &self.physical(name).ok_or_else(|| Error::UnknownColumn(name.into()))?.data {
            ColumnData::Text(v) => Ok(v),
            ColumnData::Numeric(_) => {
                Err(Error::Type(format!("column `{name}` is not categorical")))
            }
        }
    }

    /// The outcome column as integer labels.
    pub fn outcome_labels(&self) -> Result<Vec<Label>> {
        self.labels(&self.schema.outcome.column)
    }

    /// A numeric column read as integer labels.
    pub fn labels(&self, name: &str) -> Result<Vec<Label>> {
        self.numeric(name)?
            .iter()
            .enumerate()
            .map(|(row, &v)| {
                if v.is_finite() && v.fract() == 0.0 {
                    Ok(v as Label)
                } else {
                    Err(Error::Parse {
                        row,
                        column: name.to_string(),
                        message: format!("{v} is not an integer label"),
                    })
                }
            })
            .collect()
    }

    /// Per-row membership of the privileged group for a protected attribute.
    pub fn privileged_mask(&self, attr: &ProtectedAttribute) -> Result<Vec<bool>> {
        let handle = self.column(&attr.column)?;
        let view = handle.view();
        let privileged_num: Option<f64> = attr.privileged.trim().parse().ok();
        (0..self.row_count)
            .map(|r| match view.get(r) {
                Cell::Text(s) => Ok(s == attr.privileged.trim()),
                Cell::Number(v) => match privileged_num {
                    Some(p) => Ok(v == p),
                    None => Err(Error::Type(format!(
                        "privileged value `{}` is not numeric but `{}` is",
                        attr.privileged, attr.column
                    ))),
                },
            })
            .collect()
    }

    pub fn protected_attribute(&self, column: &str) -> Result<&ProtectedAttribute> {
        self.schema
            .protected
            .iter()
            .find(|p| p.column == column)
            .ok_or_else(|| Error::UnknownColumn(column.to_string()))
    }

    /// Names and values of the numeric feature columns, row-major.
    pub fn feature_matrix(&self) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
        let mut cols: Vec<(&str, &[f64])> = Vec::new();
        for spec in &self.schema.columns {
            if spec.role != ColumnRole::Feature || spec.name == self.schema.outcome.column {
                continue;
            }
            if let Some(enc) = self.encoding(&spec.name) {
                for (_, dummy) in &enc.dummies {
                    cols.push((dummy, self.numeric(dummy)?));
                }
            } else {
                let v = self.numeric(&spec.name).map_err(|_| {
                    Error::Type(format!(
                        "feature column `{}` is categorical; one-hot encode it first",
                        spec.name
                    ))
                })?;
                cols.push((&spec.name, v));
            }
        }
        let names = cols.iter().map(|(n, _)| n.to_string()).collect();
        let rows = (0..self.row_count)
            .map(|r| cols.iter().map(|(_, v)| v[r]).collect())
            .collect();
        Ok((names, rows))
    }

    /// Keeps the rows whose mask entry is `true`.
    pub fn retain_rows(&self, keep: &[bool]) -> Result<Self> {
        if keep.len() != self.row_count {
            return Err(Error::LengthMismatch {
                left: self.row_count,
                right: keep.len(),
            });
        }
        let rows: Vec<usize> = (0..self.row_count).filter(|&r| keep[r]).collect();
        Ok(self.select_rows(&rows))
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        PreparedDataset {
            schema: self.schema.clone(),
            columns: self
                .columns
                .iter()
                .map(|c| Column {
                    name: c.name.clone(),
                    data: c.data.select(rows),
                })
                .collect(),
            encodings: self.encodings.clone(),
            row_count: rows.len(),
        }
    }

    /// Errors on the first missing cell in any stored column.
    pub fn ensure_complete(&self) -> Result<()> {
        for c in &self.columns {
            let missing = match &c.data {
                ColumnData::Numeric(v) => v.iter().position(|x| x.is_nan()),
                ColumnData::Text(v) => v.iter().position(String::is_empty),
            };
            if let Some(row) = missing {
                return Err(Error::Parse {
                    row,
                    column: c.name.clone(),
                    message: "missing value".into(),
                });
            }
        }
        Ok(())
    }

    /// Checks the outcome's favorable value occurs in a non-empty dataset.
    pub fn ensure_favorable_present(&self) -> Result<()> {
        if self.is_empty() {
            return Ok(());
        }
        let fav = self.schema.favorable_label();
        if self.outcome_labels()?.contains(&fav) {
            Ok(())
        } else {
            Err(Error::Schema(format!(
                "favorable value {fav} never occurs in outcome column `{}`",
                self.schema.outcome.column
            )))
        }
    }

    /// Serialises the physical table as CSV, columns in stored order.
    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e| Error::Csv {
            path: "<memory>".into(),
            source: e,
        };
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_err)?;
        for r in 0..self.row_count {
            let record: Vec<Cow<'_, str>> = self
                .columns
                .iter()
                .map(|c| match &c.data {
                    ColumnData::Numeric(v) if v[r].is_nan() => Cow::Borrowed(""),
                    ColumnData::Numeric(v) => Cow::Owned(v[r].to_string()),
                    ColumnData::Text(v) => Cow::Borrowed(v[r].as_str()),
                })
                .collect();
            w.write_record(record.iter().map(|s| s.as_ref()))
                .map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io {
            path: "<memory>".into(),
            source: e.into_error(),
        })?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    // Internal builders used by the encoders and recipes.

    pub(crate) fn parts(self) -> (Schema, Vec<Column>, Vec<OneHotEncoding>, usize) {
        (self.schema, self.columns, self.encodings, self.row_count)
    }

    pub(crate) fn from_parts(
        schema: Schema,
        columns: Vec<Column>,
        encodings: Vec<OneHotEncoding>,
        row_count: usize,
    ) -> Self {
        PreparedDataset {
            schema,
            columns,
            encodings,
            row_count,
        }
    }
}
