//! Line-oriented schema files for custom datasets.
//!
//! ```text
//! # comment
//! column age numeric
//! column sex categorical
//! column decile numeric auxiliary
//! column y binary
//! protected sex privileged Female
//! outcome y favorable 0
//! ```
//!
//! Values containing spaces may be double-quoted.

use super::{ColumnKind, ColumnRole, ColumnSpec, OutcomeSpec, ProtectedAttribute, Schema};
use crate::error::{Error, Result};

fn words(line: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    let mut chars = line.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '"' {
            chars.next();
            let mut w = String::new();
            loop {
                match chars.next() {
                    Some('"') => break,
                    Some(ch) => w.push(ch),
                    None => return Err(Error::Config("unterminated quote".into())),
                }
            }
            out.push(w);
        } else {
            let mut w = String::new();
            while let Some(&ch) = chars.peek() {
                if ch.is_whitespace() {
                    break;
                }
                w.push(ch);
                chars.next();
            }
            out.push(w);
        }
    }
    Ok(out)
}

pub fn parse_schema(text: &str) -> Result<Schema> {
    let mut columns = Vec::new();
    let mut protected = Vec::new();
    let mut outcome = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| Error::Config(format!("schema line {}: {m}", i + 1));
        let w = words(line).map_err(|e| err(&e.to_string()))?;
        match w.first().map(String::as_str) {
            Some("column") => {
                let (name, kind) = match (w.get(1), w.get(2)) {
                    (Some(n), Some(k)) => (n, k),
                    _ => return Err(err("expected `column <name> <kind>`")),
                };
                let kind = match kind.as_str() {
                    "categorical" => ColumnKind::Categorical,
                    "numeric" => ColumnKind::Numeric,
                    "binary" => ColumnKind::Binary,
                    other => return Err(err(&format!("unknown column kind `{other}`"))),
                };
                let role = match w.get(3).map(String::as_str) {
                    None | Some("feature") => ColumnRole::Feature,
                    Some("auxiliary") => ColumnRole::Auxiliary,
                    Some(other) => return Err(err(&format!("unknown column role `{other}`"))),
                };
                columns.push(ColumnSpec {
                    name: name.clone(),
                    kind,
                    role,
                });
            }
            Some("protected") => match (w.get(1), w.get(2).map(String::as_str), w.get(3)) {
                (Some(c), Some("privileged"), Some(v)) if w.len() == 4 => {
                    protected.push(ProtectedAttribute {
                        column: c.clone(),
                        privileged: v.clone(),
                    })
                }
                _ => return Err(err("expected `protected <column> privileged <value>`")),
            },
            Some("outcome") => match (w.get(1), w.get(2).map(String::as_str), w.get(3)) {
                (Some(c), Some("favorable"), Some(v)) if w.len() == 4 => {
                    if outcome.is_some() {
                        return Err(err("outcome declared twice"));
                    }
                    outcome = Some(OutcomeSpec {
                        column: c.clone(),
                        favorable: v.clone(),
                    })
                }
                _ => return Err(err("expected `outcome <column> favorable <value>`")),
            },
            Some(other) => return Err(err(&format!("unknown directive `{other}`"))),
            None => unreachable!(),
        }
    }
    let outcome = outcome.ok_or_else(|| Error::Config("schema declares no outcome".into()))?;
    Schema::new(columns, protected, outcome)
}
