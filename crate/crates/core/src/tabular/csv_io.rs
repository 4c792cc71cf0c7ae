use std::path::Path;

use super::{ColumnData, ColumnKind, PreparedDataset, Schema};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum HeaderMode {
    /// First record names the columns. Duplicate names resolve to the first.
    Present,
    /// No header; the given names label the fields by position.
    Absent(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub header: HeaderMode,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            header: HeaderMode::Present,
        }
    }
}

/// Reads the schema's columns from a delimited file into a raw dataset.
///
/// Cells are trimmed. An empty numeric cell becomes `NaN` (missing); any other
/// unparseable numeric cell is an error carrying its 0-based data row.
pub fn load_csv(path: impl AsRef<Path>, schema: &Schema, opts: &CsvOptions) -> Result<PreparedDataset> {
    let path = path.as_ref();
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(matches!(opts.header, HeaderMode::Present))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::Config(format!("{}: {other:?}", path.display())),
        })?;

    let names: Vec<String> = match &opts.header {
        HeaderMode::Present => reader
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_string)
            .collect(),
        HeaderMode::Absent(names) => names.clone(),
    };
    let positions: Vec<usize> = schema
        .columns()
        .iter()
        .map(|c| {
            names
                .iter()
                .position(|n| *n == c.name)
                .ok_or_else(|| Error::Schema(format!("missing column `{}`", c.name)))
        })
        .collect::<Result<_>>()?;

    let mut data: Vec<ColumnData> = schema
        .columns()
        .iter()
        .map(|c| match c.kind {
            ColumnKind::Categorical => ColumnData::Text(Vec::new()),
            _ => ColumnData::Numeric(Vec::new()),
        })
        .collect();

    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        for ((spec, &pos), col) in schema.columns().iter().zip(&positions).zip(&mut data) {
            let cell = record.get(pos).ok_or_else(|| Error::Parse {
                row,
                column: spec.name.clone(),
                message: "record is too short".into(),
            })?;
            match col {
                ColumnData::Text(v) => v.push(cell.to_string()),
                ColumnData::Numeric(v) => {
                    if cell.is_empty() {
                        v.push(f64::NAN);
                    } else {
                        let x: f64 = cell.parse().map_err(|_| Error::Parse {
                            row,
                            column: spec.name.clone(),
                            message: format!("`{cell}` is not a number"),
                        })?;
                        v.push(x);
                    }
                }
            }
        }
    }
    PreparedDataset::from_columns(schema.clone(), data)
}
