use std::collections::HashMap;

use serde::Serialize;

use super::{
    Column, ColumnData, ColumnKind, ColumnRole, ColumnSpec, OneHotEncoding, PreparedDataset,
    Schema,
};
use crate::error::{Error, Result};

/// Cut points turning a numeric column into labelled categories.
///
/// `edges` of length `k + 1` define `k` intervals. The first interval is
/// closed on both ends, `[e0, e1]`; every later one is `(e_i, e_{i+1}]`.
/// Infinite outer edges are allowed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinSpec {
    source: String,
    edges: Vec<f64>,
    labels: Vec<String>,
    target: Option<(String, ColumnRole)>,
}

impl BinSpec {
    pub fn new(
        source: impl Into<String>,
        edges: Vec<f64>,
        labels: Vec<impl Into<String>>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if edges.len() < 2 {
            return Err(Error::InvalidArgument("a bin spec needs at least two edges".into()));
        }
        if edges.iter().any(|e| e.is_nan()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "bin edges must be strictly increasing".into(),
            ));
        }
        if labels.len() + 1 != edges.len() {
            return Err(Error::InvalidArgument(format!(
                "{} edges need {} labels, got {}",
                edges.len(),
                edges.len() - 1,
                labels.len()
            )));
        }
        Ok(BinSpec {
            source: source.into(),
            edges,
            labels,
            target: None,
        })
    }

    /// Writes the bins to a new column instead of replacing the source.
    pub fn into_column(mut self, name: impl Into<String>, role: ColumnRole) -> Self {
        self.target = Some((name.into(), role));
        self
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Index of the interval containing `value`.
    pub fn bin_of(&self, value: f64) -> Option<usize> {
        if value.is_nan() || value < self.edges[0] {
            return None;
        }
        self.edges[1..].iter().position(|&hi| value <= hi)
    }
}

impl PreparedDataset {
    pub fn bin_numeric(self, spec: &BinSpec) -> Result<Self> {
        let col_spec = self
            .schema
            .column(&spec.source)
            .ok_or_else(|| Error::UnknownColumn(spec.source.clone()))?
            .clone();
        if col_spec.kind == ColumnKind::Categorical {
            return Err(Error::Type(format!(
                "cannot bin categorical column `{}`",
                spec.source
            )));
        }
        if spec.source == self.schema.outcome.column && spec.target.is_none() {
            return Err(Error::Type("cannot replace the outcome column by bins".into()));
        }
        let values = self.numeric(&spec.source)?;
        let binned = values
            .iter()
            .enumerate()
            .map(|(row, &v)| {
                spec.bin_of(v)
                    .map(|b| spec.labels[b].clone())
                    .ok_or_else(|| Error::Binning {
                        row,
                        column: spec.source.clone(),
                        value: v,
                    })
            })
            .collect::<Result<Vec<_>>>()?;

        let (schema, mut columns, encodings, rows) = self.parts();
        let (mut specs, protected, outcome) = (schema.columns, schema.protected, schema.outcome);
        let pos = columns
            .iter()
            .position(|c| c.name == spec.source)
            .expect("source is stored");
        let spec_pos = specs.iter().position(|c| c.name == spec.source).unwrap();
        match &spec.target {
            None => {
                columns[pos].data = ColumnData::Text(binned);
                specs[spec_pos].kind = ColumnKind::Categorical;
            }
            Some((name, role)) => {
                columns.insert(
                    pos + 1,
                    Column {
                        name: name.clone(),
                        data: ColumnData::Text(binned),
                    },
                );
                specs.insert(
                    spec_pos + 1,
                    ColumnSpec {
                        name: name.clone(),
                        kind: ColumnKind::Categorical,
                        role: *role,
                    },
                );
            }
        }
        let schema = Schema::new(specs, protected, outcome)?;
        Ok(PreparedDataset::from_parts(schema, columns, encodings, rows))
    }

    /// Replaces each named categorical column by one 0/1 dummy column per
    /// distinct value, in first-seen order. Dummies are named `column=value`.
    pub fn one_hot(self, names: &[&str]) -> Result<Self> {
        for name in names {
            match self.schema.column(name) {
                None => return Err(Error::UnknownColumn(name.to_string())),
                Some(c) if c.kind != ColumnKind::Categorical => {
                    return Err(Error::Type(format!(
                        "column `{name}` is {}, not categorical",
                        c.kind
                    )))
                }
                Some(_) if self.encoding(name).is_some() => {
                    return Err(Error::Type(format!("column `{name}` is already encoded")))
                }
                Some(_) => {}
            }
        }
        let (schema, mut columns, mut encodings, rows) = self.parts();
        for name in names {
            let pos = columns.iter().position(|c| c.name == *name).unwrap();
            let values = match &columns[pos].data {
                ColumnData::Text(v) => v,
                ColumnData::Numeric(_) => unreachable!("categorical columns hold text"),
            };
            let mut order: Vec<String> = Vec::new();
            let mut index: HashMap<&str, usize> = HashMap::new();
            let codes: Vec<usize> = values
                .iter()
                .map(|v| {
                    *index.entry(v.as_str()).or_insert_with(|| {
                        order.push(v.clone());
                        order.len() - 1
                    })
                })
                .collect();
            let dummy_names: Vec<String> = order.iter().map(|v| format!("{name}={v}")).collect();
            for d in &dummy_names {
                if columns.iter().any(|c| &c.name == d) {
                    return Err(Error::Schema(format!("dummy column `{d}` already exists")));
                }
            }
            let dummies: Vec<Column> = dummy_names
                .iter()
                .enumerate()
                .map(|(k, d)| Column {
                    name: d.clone(),
                    data: ColumnData::Numeric(
                        codes.iter().map(|&c| if c == k { 1.0 } else { 0.0 }).collect(),
                    ),
                })
                .collect();
            encodings.push(OneHotEncoding {
                source: name.to_string(),
                dummies: order.into_iter().zip(dummy_names).collect(),
            });
            columns.splice(pos..=pos, dummies);
        }
        Ok(PreparedDataset::from_parts(schema, columns, encodings, rows))
    }
}
