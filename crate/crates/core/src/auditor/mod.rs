//! Auditor relations as ordered rule sets, and pointwise comparison of a
//! system against an auditor.

mod parse;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tabular::{Cell, ColumnKind, ColumnView, PreparedDataset, Schema};
use crate::Label;

/// Rule files shipped with the crate.
pub mod builtin {
    pub const COMPAS_BINARY: &str = include_str!("../../rules/compas_binary.rules");
    pub const COMPAS_DECILE: &str = include_str!("../../rules/compas_decile.rules");
    pub const ADULT: &str = include_str!("../../rules/adult.rules");
    pub const CREDIT: &str = include_str!("../../rules/credit.rules");

    pub fn by_name(name: &str) -> Option<&'static str> {
        match name {
            "compas_binary" | "compas-binary" => Some(COMPAS_BINARY),
            "compas_decile" | "compas-decile" => Some(COMPAS_DECILE),
            "adult" => Some(ADULT),
            "credit" | "german" => Some(CREDIT),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CompareOp {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl CompareOp {
    fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            CompareOp::Eq => lhs == rhs,
            CompareOp::Lt => lhs < rhs,
            CompareOp::Gt => lhs > rhs,
            CompareOp::Le => lhs <= rhs,
            CompareOp::Ge => lhs >= rhs,
        }
    }
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompareOp::Eq => "=",
            CompareOp::Lt => "<",
            CompareOp::Gt => ">",
            CompareOp::Le => "<=",
            CompareOp::Ge => ">=",
        })
    }
}

/// A value written in a rule. Compared as text against categorical columns
/// and as a number against numeric ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Literal {
    text: String,
    number: Option<f64>,
}

const KEYWORDS: [&str; 5] = ["and", "in", "when", "otherwise", "output"];

impl Literal {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        let number = text.parse::<f64>().ok().filter(|v| v.is_finite());
        Literal { text, number }
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn number(&self) -> Option<f64> {
        self.number
    }

    fn matches(&self, cell: Cell<'_>) -> bool {
        match cell {
            Cell::Number(v) => self.number == Some(v),
            Cell::Text(s) => s == self.text,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bare = !self.text.is_empty()
            && self.text.chars().all(parse::is_word_char)
            && !self.text.contains("->")
            && !KEYWORDS.contains(&self.text.as_str());
        if bare {
            f.write_str(&self.text)
        } else {
            write!(f, "\"{}\"", self.text)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Predicate {
    Compare(CompareOp, Literal),
    /// Inclusive numeric range.
    Range(f64, f64),
    Set(Vec<Literal>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition {
    pub column: String,
    pub predicate: Predicate,
}

impl Condition {
    fn holds(&self, cell: Cell<'_>) -> bool {
        match (&self.predicate, cell) {
            (Predicate::Compare(CompareOp::Eq, lit), c) => lit.matches(c),
            (Predicate::Compare(op, lit), Cell::Number(v)) => {
                lit.number.is_some_and(|x| op.holds(v, x))
            }
            (Predicate::Range(lo, hi), Cell::Number(v)) => *lo <= v && v <= *hi,
            (Predicate::Set(values), c) => values.iter().any(|lit| lit.matches(c)),
            _ => false,
        }
    }

    fn check(&self, schema: &Schema) -> Result<()> {
        let spec = schema
            .column(&self.column)
            .ok_or_else(|| Error::UnknownColumn(self.column.clone()))?;
        let categorical = spec.kind == ColumnKind::Categorical;
        let type_err = |what: &str| {
            Err(Error::Type(format!(
                "condition `{self}`: {what} on {} column `{}`",
                spec.kind, self.column
            )))
        };
        match &self.predicate {
            Predicate::Compare(CompareOp::Eq, lit) if !categorical && lit.number.is_none() => {
                type_err("text value")
            }
            Predicate::Compare(op, _) if categorical && *op != CompareOp::Eq => {
                type_err("ordering comparison")
            }
            Predicate::Range(..) if categorical => type_err("numeric range"),
            Predicate::Set(values) if !categorical && values.iter().any(|v| v.number.is_none()) => {
                type_err("text value")
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let col = Literal::new(self.column.clone());
        match &self.predicate {
            Predicate::Compare(op, lit) => write!(f, "{col} {op} {lit}"),
            Predicate::Range(lo, hi) => write!(f, "{col} in [{lo}, {hi}]"),
            Predicate::Set(values) => {
                write!(f, "{col} in {{")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}")?;
                }
                f.write_str("}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub label: Label,
}

/// An ordered first-match classifier with a mandatory default label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuleSet {
    output: Option<(String, Vec<Label>)>,
    rules: Vec<Rule>,
    default: Label,
}

impl RuleSet {
    fn from_parts(output: Option<(String, Vec<Label>)>, rules: Vec<Rule>, default: Label) -> Self {
        RuleSet {
            output,
            rules,
            default,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse::parse(text)
    }

    /// Parses and checks every condition against a schema.
    pub fn parse_for(text: &str, schema: &Schema) -> Result<Self> {
        let rs = Self::parse(text)?;
        rs.check(schema)?;
        Ok(rs)
    }

    pub fn output_name(&self) -> Option<&str> {
        self.output.as_ref().map(|(n, _)| n.as_str())
    }

    /// The declared label domain, or the labels the rules can produce.
    pub fn domain(&self) -> Vec<Label> {
        match &self.output {
            Some((_, d)) => d.clone(),
            None => self
                .rules
                .iter()
                .map(|r| r.label)
                .chain(std::iter::once(self.default))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn default_label(&self) -> Label {
        self.default
    }

    /// Distinct referenced columns in first-use order.
    pub fn columns(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for c in self.rules.iter().flat_map(|r| &r.conditions) {
            if !out.contains(&c.column.as_str()) {
                out.push(&c.column);
            }
        }
        out
    }

    pub fn check(&self, schema: &Schema) -> Result<()> {
        self.rules
            .iter()
            .flat_map(|r| &r.conditions)
            .try_for_each(|c| c.check(schema))
    }

    /// Index of the first matching rule for every row; `None` means the
    /// default clause fired.
    pub fn apply_traced(&self, ds: &PreparedDataset) -> Result<Vec<Option<usize>>> {
        self.check(ds.schema())?;
        let names = self.columns();
        let handles = names
            .iter()
            .map(|n| ds.column(n))
            .collect::<Result<Vec<_>>>()?;
        let views: Vec<ColumnView<'_>> = handles.iter().map(|h| h.view()).collect();
        let compiled: Vec<Vec<(usize, &Condition)>> = self
            .rules
            .iter()
            .map(|r| {
                r.conditions
                    .iter()
                    .map(|c| (names.iter().position(|n| *n == c.column).unwrap(), c))
                    .collect()
            })
            .collect();
        Ok((0..ds.row_count())
            .into_par_iter()
            .map(|row| {
                compiled
                    .iter()
                    .position(|conds| conds.iter().all(|(k, c)| c.holds(views[*k].get(row))))
            })
            .collect())
    }

    pub fn apply(&self, ds: &PreparedDataset) -> Result<Vec<Label>> {
        Ok(self
            .apply_traced(ds)?
            .into_iter()
            .map(|m| m.map_or(self.default, |i| self.rules[i].label))
            .collect())
    }
}

impl FromStr for RuleSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for RuleSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some((name, domain)) = &self.output {
            let labels: Vec<String> = domain.iter().map(Label::to_string).collect();
            writeln!(f, "output {} in {{{}}}", Literal::new(name.clone()), labels.join(", "))?;
        }
        for r in &self.rules {
            f.write_str("when ")?;
            for (i, c) in r.conditions.iter().enumerate() {
                if i > 0 {
                    f.write_str(" and ")?;
                }
                write!(f, "{c}")?;
            }
            writeln!(f, " -> {}", r.label)?;
        }
        writeln!(f, "otherwise -> {}", self.default)
    }
}

pub fn parse_ruleset(text: &str) -> Result<RuleSet> {
    RuleSet::parse(text)
}

pub fn apply_ruleset(rs: &RuleSet, ds: &PreparedDataset) -> Result<Vec<Label>> {
    rs.apply(ds)
}

/// Per-row output distances between a system `g` and an auditor `f`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceProfile {
    pub distances: Vec<f64>,
    pub max_distance: f64,
    pub epsilon: f64,
    /// Every distance is strictly below ε.
    pub nc_fair: bool,
    /// Rows whose distance is at least ε.
    pub violations: usize,
}

impl DistanceProfile {
    pub fn judgments(&self) -> Vec<Judgment> {
        self.distances
            .iter()
            .map(|&d| Judgment::from_distance(d, self.epsilon))
            .collect()
    }

    /// A single verdict: unfair as soon as one row is.
    pub fn judgment(&self) -> Judgment {
        if self.nc_fair {
            Judgment::Fair
        } else {
            Judgment::Unfair
        }
    }
}

pub fn distance_profile(g: &[Label], f: &[Label], epsilon: f64) -> Result<DistanceProfile> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {epsilon}")));
    }
    if g.len() != f.len() {
        return Err(Error::LengthMismatch {
            left: g.len(),
            right: f.len(),
        });
    }
    let distances: Vec<f64> = g.iter().zip(f).map(|(a, b)| (a - b).abs() as f64).collect();
    let max_distance = distances.iter().copied().fold(0.0, f64::max);
    let violations = distances.iter().filter(|&&d| d >= epsilon).count();
    Ok(DistanceProfile {
        distances,
        max_distance,
        epsilon,
        nc_fair: violations == 0,
        violations,
    })
}

/// The auditor's binary score `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Judgment {
    /// s = 0
    Fair,
    /// s = 1
    Unfair,
}

impl Judgment {
    fn from_distance(d: f64, epsilon: f64) -> Self {
        if d >= epsilon {
            Judgment::Unfair
        } else {
            Judgment::Fair
        }
    }

    pub fn score(self) -> u8 {
        match self {
            Judgment::Fair => 0,
            Judgment::Unfair => 1,
        }
    }
}

pub fn judgment(g_x: Label, f_x: Label, epsilon: f64) -> Judgment {
    Judgment::from_distance((g_x - f_x).abs() as f64, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{ColumnData, ColumnSpec, OutcomeSpec, ProtectedAttribute};

    const CREDIT_ONE_LINE: &str =
        "savings > 500 and credit-history = Paid and employment > 2 -> 1; otherwise -> 2";

    fn german_like(rows: &[(f64, &str, f64)]) -> PreparedDataset {
        let schema = Schema::new(
            vec![
                ColumnSpec::feature("savings", ColumnKind::Numeric),
                ColumnSpec::feature("credit-history", ColumnKind::Categorical),
                ColumnSpec::feature("employment", ColumnKind::Numeric),
                ColumnSpec::feature("sex", ColumnKind::Categorical),
                ColumnSpec::auxiliary("credit", ColumnKind::Numeric),
            ],
            vec![ProtectedAttribute {
                column: "sex".into(),
                privileged: "male".into(),
            }],
            OutcomeSpec {
                column: "credit".into(),
                favorable: "1".into(),
            },
        )
        .unwrap();
        PreparedDataset::from_columns(
            schema,
            vec![
                ColumnData::Numeric(rows.iter().map(|r| r.0).collect()),
                ColumnData::Text(rows.iter().map(|r| r.1.to_string()).collect()),
                ColumnData::Numeric(rows.iter().map(|r| r.2).collect()),
                ColumnData::Text(vec!["male".into(); rows.len()]),
                ColumnData::Numeric(vec![1.0; rows.len()]),
            ],
        )
        .unwrap()
        .one_hot(&["credit-history"])
        .unwrap()
    }

    #[test]
    fn credit_relation_on_one_line() {
        let rs = parse_ruleset(CREDIT_ONE_LINE).unwrap();
        assert_eq!(rs.rules().len(), 1);
        assert_eq!(rs.rules()[0].conditions.len(), 3);
        assert_eq!(rs.default_label(), 2);
        assert_eq!(rs.domain(), vec![1, 2]);
    }

    #[test]
    fn missing_default_is_reported() {
        assert!(matches!(
            parse_ruleset("when a = 1 -> 1"),
            Err(Error::MissingDefault)
        ));
        assert!(matches!(parse_ruleset(""), Err(Error::MissingDefault)));
    }

    #[test]
    fn education_set_has_four_values() {
        let rs = parse_ruleset(builtin::ADULT).unwrap();
        match &rs.rules()[0].conditions[0].predicate {
            Predicate::Set(v) => assert_eq!(v.len(), 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn applies_credit_relation_through_one_hot() {
        let ds = german_like(&[(800.0, "Paid", 4.0), (100.0, "Paid", 4.0), (800.0, "Critical", 4.0)]);
        let rs = RuleSet::parse_for(builtin::CREDIT, ds.schema()).unwrap();
        assert_eq!(rs.apply(&ds).unwrap(), vec![1, 2, 2]);
        assert_eq!(rs.apply_traced(&ds).unwrap(), vec![Some(0), None, None]);
    }

    #[test]
    fn unknown_column_fails_before_evaluation() {
        let ds = german_like(&[(800.0, "Paid", 4.0)]);
        let rs = parse_ruleset("when income > 3 -> 1\notherwise -> 2").unwrap();
        assert!(matches!(rs.apply(&ds), Err(Error::UnknownColumn(c)) if c == "income"));
    }

    #[test]
    fn type_checks_conditions() {
        let ds = german_like(&[(800.0, "Paid", 4.0)]);
        for bad in [
            "credit-history > 3 -> 1; otherwise -> 2",
            "credit-history in [1, 2] -> 1; otherwise -> 2",
            "savings = lots -> 1; otherwise -> 2",
            "savings in {a, 2} -> 1; otherwise -> 2",
        ] {
            let rs = parse_ruleset(bad).unwrap();
            assert!(matches!(rs.check(ds.schema()), Err(Error::Type(_))), "{bad}");
        }
    }

    #[test]
    fn boundaries_follow_notation() {
        let rs = parse_ruleset("x in [1, 3] -> 1; x > 3 -> 2; x >= 3 -> 9; otherwise -> 0").unwrap();
        let eval = |v: f64| {
            rs.rules()
                .iter()
                .find(|r| r.conditions[0].holds(Cell::Number(v)))
                .map_or(rs.default_label(), |r| r.label)
        };
        assert_eq!(eval(1.0), 1);
        assert_eq!(eval(3.0), 1);
        assert_eq!(eval(3.5), 2);
        assert_eq!(eval(0.0), 0);
    }

    #[test]
    fn display_round_trips_builtins() {
        for text in [
            builtin::COMPAS_BINARY,
            builtin::COMPAS_DECILE,
            builtin::ADULT,
            builtin::CREDIT,
            CREDIT_ONE_LINE,
        ] {
            let rs = parse_ruleset(text).unwrap();
            let again = parse_ruleset(&rs.to_string()).unwrap();
            assert_eq!(rs, again);
        }
    }

    #[test]
    fn quoted_values_survive_display() {
        let rs = parse_ruleset("age = \">45\" and name = \"two words\" and w = \"in\" -> 1\notherwise -> 0").unwrap();
        let text = rs.to_string();
        assert!(text.contains("\">45\"") && text.contains("\"two words\"") && text.contains("\"in\""));
        assert_eq!(parse_ruleset(&text).unwrap(), rs);
    }

    #[test]
    fn profiles_and_judgments() {
        let p = distance_profile(&[1, 0, 1], &[1, 0, 1], 0.5).unwrap();
        assert!(p.nc_fair);
        assert_eq!(p.max_distance, 0.0);

        let p = distance_profile(&[1, 0, 1], &[1, 1, 1], 1.0).unwrap();
        assert!(!p.nc_fair);
        assert_eq!(p.judgments().iter().map(|j| j.score()).collect::<Vec<_>>(), vec![0, 1, 0]);

        let p = distance_profile(&[1, 5, 10], &[4, 5, 8], 4.0).unwrap();
        assert_eq!(p.max_distance, 3.0);
        assert!(p.nc_fair);

        assert!(distance_profile(&[1], &[1, 2], 1.0).is_err());
        assert!(distance_profile(&[1], &[1], 0.0).is_err());

        assert_eq!(judgment(1, 1, 1.0), Judgment::Fair);
        assert_eq!(judgment(0, 1, 1.0), Judgment::Unfair);
        assert_eq!(judgment(5, 3, 4.0), Judgment::Fair);
    }
}
