use serde::Serialize;

use super::{estimate_m, group_transfer};
use crate::auditor::RuleSet;
use crate::error::Result;
use crate::metrics::{dataset_group_difference, Notion, Rate};
use crate::tabular::{PreparedDataset, ProtectedAttribute};
use crate::Label;

/// One auditor metric: predictions are the auditor's outputs, labels the
/// dataset outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditorMetricRow {
    pub dataset: String,
    pub metric: Notion,
    pub protected: String,
    pub value: f64,
    pub delta: Option<f64>,
    pub satisfied: Option<bool>,
    pub unprivileged: Rate,
    pub privileged: Rate,
}

/// Every notion for every protected attribute of the dataset.
pub fn table1_rows(
    dataset: &str,
    ds: &PreparedDataset,
    auditor_outputs: &[Label],
    delta: Option<f64>,
) -> Result<Vec<AuditorMetricRow>> {
    let labels = ds.outcome_labels()?;
    let mut rows = Vec::new();
    for notion in Notion::ALL {
        for attr in ds.schema().protected() {
            let d = dataset_group_difference(ds, attr, notion, auditor_outputs, &labels)?;
            rows.push(AuditorMetricRow {
                dataset: dataset.to_string(),
                metric: notion,
                protected: attr.column.clone(),
                value: d.value,
                delta,
                satisfied: delta.map(|t| d.satisfies(t)),
                unprivileged: d.unprivileged,
                privileged: d.privileged,
            });
        }
    }
    Ok(rows)
}

/// A system-versus-auditor row.
///
/// The system `g` is evaluated with the auditor's outputs as ground truth;
/// the auditor `f` with the dataset outcome as ground truth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferBoundReport {
    pub dataset: String,
    pub notion: Notion,
    pub protected: String,
    pub epsilon: f64,
    /// Auditor's signed metric.
    pub delta: f64,
    /// `(p(g, u) - p(f, u)) / ε` on the unprivileged group `u`.
    pub m_hat: f64,
    /// System's signed metric.
    pub outcome_distance: f64,
    /// `2 M̂ ε + δ`.
    pub upper_bound: f64,
    /// `outcome_distance <= upper_bound`.
    pub satisfied: bool,
    /// `|outcome_distance| <= |upper_bound|`.
    pub satisfied_abs: bool,
    pub system_unprivileged: Rate,
    pub system_privileged: Rate,
    pub auditor_unprivileged: Rate,
    pub auditor_privileged: Rate,
}

impl TransferBoundReport {
    /// `upper_bound - (2 M̂ ε + δ)`, zero by construction.
    pub fn arithmetic_residual(&self) -> f64 {
        self.upper_bound - (2.0 * self.m_hat * self.epsilon + self.delta)
    }
}

pub fn table2_row_from_outputs(
    dataset: &str,
    ds: &PreparedDataset,
    system_outputs: &[Label],
    auditor_outputs: &[Label],
    attr: &ProtectedAttribute,
    notion: Notion,
    epsilon: f64,
) -> Result<TransferBoundReport> {
    let truth = ds.outcome_labels()?;
    let auditor = dataset_group_difference(ds, attr, notion, auditor_outputs, &truth)?;
    let system = dataset_group_difference(ds, attr, notion, system_outputs, auditor_outputs)?;
    // Both unprivileged rates are defined once the differences are.
    let p_g = system.unprivileged.value().expect("defined");
    let p_f = auditor.unprivileged.value().expect("defined");
    let m_hat = estimate_m(p_g, p_f, epsilon)?;
    let upper_bound = group_transfer(epsilon, auditor.value, m_hat)?;
    Ok(TransferBoundReport {
        dataset: dataset.to_string(),
        notion,
        protected: attr.column.clone(),
        epsilon,
        delta: auditor.value,
        m_hat,
        outcome_distance: system.value,
        upper_bound,
        satisfied: system.value <= upper_bound,
        satisfied_abs: system.value.abs() <= upper_bound.abs(),
        system_unprivileged: system.unprivileged,
        system_privileged: system.privileged,
        auditor_unprivileged: auditor.unprivileged,
        auditor_privileged: auditor.privileged,
    })
}

/// Table II row with the dataset outcome as the system and `rules` as the
/// auditor.
pub fn table2_row(
    dataset: &str,
    ds: &PreparedDataset,
    system_outputs: &[Label],
    rules: &RuleSet,
    attr: &ProtectedAttribute,
    notion: Notion,
    epsilon: f64,
) -> Result<TransferBoundReport> {
    let auditor = rules.apply(ds)?;
    table2_row_from_outputs(dataset, ds, system_outputs, &auditor, attr, notion, epsilon)
}
