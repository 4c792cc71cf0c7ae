//! Write an auditor as rules, apply it, and see which rule fired per row.

use ncfair::auditor::{distance_profile, RuleSet};
use ncfair::tabular::{
    ColumnData, ColumnKind, ColumnSpec, OutcomeSpec, PreparedDataset, ProtectedAttribute, Schema,
};

const RULES: &str = r#"
output approve in {0, 1}
# first match wins
when income >= 50 and region in {north, "far east"} -> 1
when income in [30, 49], region = south -> 1
otherwise -> 0
"#;

fn main() -> ncfair::Result<()> {
    let schema = Schema::new(
        vec![
            ColumnSpec::feature("income", ColumnKind::Numeric),
            ColumnSpec::feature("region", ColumnKind::Categorical),
            ColumnSpec::auxiliary("group", ColumnKind::Categorical),
            ColumnSpec::auxiliary("approved", ColumnKind::Binary),
        ],
        vec![ProtectedAttribute { column: "group".into(), privileged: "a".into() }],
        OutcomeSpec { column: "approved".into(), favorable: "1".into() },
    )?;
    let ds = PreparedDataset::from_columns(
        schema,
        vec![
            ColumnData::Numeric(vec![20.0, 35.0, 55.0, 60.0, 45.0]),
            ColumnData::Text(["south", "south", "north", "far east", "north"].map(String::from).to_vec()),
            ColumnData::Text(["a", "b", "a", "b", "b"].map(String::from).to_vec()),
            ColumnData::Numeric(vec![0.0, 1.0, 1.0, 0.0, 1.0]),
        ],
    )?;

    let rules = RuleSet::parse_for(RULES, ds.schema())?;
    println!("canonical form:\n{rules}");

    let fired = rules.apply_traced(&ds)?;
    let auditor = rules.apply(&ds)?;
    for (row, (rule, label)) in fired.iter().zip(&auditor).enumerate() {
        let which = rule.map_or("otherwise".to_string(), |i| format!("rule {}", i + 1));
        println!("row {row}: {which} -> {label}");
    }

    let system = ds.outcome_labels()?;
    let profile = distance_profile(&system, &auditor, 1.0)?;
    println!(
        "system vs auditor at ε = 1: {} of {} rows judged unfair",
        profile.violations,
        profile.distances.len()
    );

    match RuleSet::parse("when income > 10 -> 1") {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("a rule set needs a default"),
    }
    Ok(())
}
