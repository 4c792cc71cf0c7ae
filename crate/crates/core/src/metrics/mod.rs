//! Comparative fairness metrics: group rate differences, their coarse δ
//! checks, Mahalanobis distances and the pairwise individual-fairness scan.

mod covariance;
mod scan;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tabular::{PreparedDataset, ProtectedAttribute};
use crate::Label;

pub use covariance::{covariance, mahalanobis, CovarianceModel, InverseMethod};
pub use scan::{if_scan, pairwise_if_scan, IFScanResult, ScanCell, ScanOptions, DEFAULT_PAIR_CAP};

/// The three group notions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Notion {
    StatisticalParity,
    EqualOpportunity,
    Calibration,
}

impl Notion {
    pub const ALL: [Notion; 3] = [
        Notion::StatisticalParity,
        Notion::EqualOpportunity,
        Notion::Calibration,
    ];

    /// Short code used in tables and flags.
    pub fn code(self) -> &'static str {
        match self {
            Notion::StatisticalParity => "sp",
            Notion::EqualOpportunity => "eo",
            Notion::Calibration => "cal",
        }
    }

    /// Name of the difference metric for this notion.
    pub fn metric_name(self) -> &'static str {
        match self {
            Notion::StatisticalParity => "statistical_parity_difference",
            Notion::EqualOpportunity => "equal_opportunity_difference",
            Notion::Calibration => "calibration_difference",
        }
    }

    fn needs_labels(self) -> bool {
        self != Notion::StatisticalParity
    }
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notion::StatisticalParity => "statistical parity",
            Notion::EqualOpportunity => "equal opportunity",
            Notion::Calibration => "calibration",
        })
    }
}

impl FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sp" | "statistical-parity" | "statistical_parity" => Ok(Notion::StatisticalParity),
            "eo" | "equal-opportunity" | "equal_opportunity" => Ok(Notion::EqualOpportunity),
            "cal" | "calibration" => Ok(Notion::Calibration),
            other => Err(Error::Config(format!("unknown notion `{other}` (sp|eo|cal)"))),
        }
    }
}

/// A count-based rate `hits / support`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Rate {
    pub hits: u64,
    pub support: u64,
}

impl Rate {
    /// `None` when the conditioning event is empty.
    pub fn value(self) -> Option<f64> {
        (self.support > 0).then(|| self.hits as f64 / self.support as f64)
    }
}

/// Rates for one side of a protected attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct GroupRates {
    /// P[prediction = fav]
    pub favorable: Rate,
    /// P[prediction = fav | label = fav]
    pub tpr: Rate,
    /// P[label = fav | prediction = fav]
    pub ppv: Rate,
}

impl GroupRates {
    pub fn get(&self, notion: Notion) -> Rate {
        match notion {
            Notion::StatisticalParity => self.favorable,
            Notion::EqualOpportunity => self.tpr,
            Notion::Calibration => self.ppv,
        }
    }
}

/// Rates of the unprivileged (`mask == false`) and privileged groups.
///
/// Without labels only the favorable rate is filled in.
pub fn group_rates(
    predictions: &[Label],
    labels: Option<&[Label]>,
    privileged: &[bool],
    favorable: Label,
) -> Result<[GroupRates; 2]> {
    if predictions.len() != privileged.len() {
        return Err(Error::LengthMismatch {
            left: predictions.len(),
            right: privileged.len(),
        });
    }
    if let Some(l) = labels {
        if l.len() != predictions.len() {
            return Err(Error::LengthMismatch {
                left: predictions.len(),
                right: l.len(),
            });
        }
    }
    let mut out = [GroupRates::default(); 2];
    for (i, (&p, &priv_)) in predictions.iter().zip(privileged).enumerate() {
        let g = &mut out[usize::from(priv_)];
        let pred_fav = p == favorable;
        g.favorable.support += 1;
        g.favorable.hits += u64::from(pred_fav);
        if let Some(l) = labels {
            let label_fav = l[i] == favorable;
            if label_fav {
                g.tpr.support += 1;
                g.tpr.hits += u64::from(pred_fav);
            }
            if pred_fav {
                g.ppv.support += 1;
                g.ppv.hits += u64::from(label_fav);
            }
        }
    }
    Ok(out)
}

/// A signed group difference with the counts behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupDifference {
    pub notion: Notion,
    /// Unprivileged rate minus privileged rate.
    pub value: f64,
    pub unprivileged: Rate,
    pub privileged: Rate,
}

impl GroupDifference {
    pub fn satisfies(&self, delta: f64) -> bool {
        satisfies_coarse(self.value, delta)
    }
}

fn rate_value(rate: Rate, notion: Notion, group: &str) -> Result<f64> {
    rate.value().ok_or_else(|| Error::UndefinedRate {
        notion: notion.to_string(),
        group: group.into(),
    })
}

pub fn group_difference(
    notion: Notion,
    predictions: &[Label],
    labels: &[Label],
    privileged: &[bool],
    favorable: Label,
) -> Result<GroupDifference> {
    let labels = notion.needs_labels().then_some(labels);
    let [unpriv, priv_] = group_rates(predictions, labels, privileged, favorable)?;
    let (u, p) = (unpriv.get(notion), priv_.get(notion));
    Ok(GroupDifference {
        notion,
        value: rate_value(u, notion, "unprivileged")? - rate_value(p, notion, "privileged")?,
        unprivileged: u,
        privileged: p,
    })
}

pub fn statistical_parity_difference(
    predictions: &[Label],
    privileged: &[bool],
    favorable: Label,
) -> Result<f64> {
    group_difference(Notion::StatisticalParity, predictions, &[], privileged, favorable)
        .map(|d| d.value)
}

pub fn equal_opportunity_difference(
    predictions: &[Label],
    labels: &[Label],
    privileged: &[bool],
    favorable: Label,
) -> Result<f64> {
    group_difference(Notion::EqualOpportunity, predictions, labels, privileged, favorable)
        .map(|d| d.value)
}

pub fn calibration_difference(
    predictions: &[Label],
    labels: &[Label],
    privileged: &[bool],
    favorable: Label,
) -> Result<f64> {
    group_difference(Notion::Calibration, predictions, labels, privileged, favorable)
        .map(|d| d.value)
}

/// The coarse notion: `|value| <= delta`.
pub fn satisfies_coarse(metric_value: f64, delta: f64) -> bool {
    metric_value.abs() <= delta
}

/// Group difference on a dataset for one protected attribute, using the
/// dataset's favorable outcome.
pub fn dataset_group_difference(
    ds: &PreparedDataset,
    attr: &ProtectedAttribute,
    notion: Notion,
    predictions: &[Label],
    labels: &[Label],
) -> Result<GroupDifference> {
    let mask = ds.privileged_mask(attr)?;
    group_difference(notion, predictions, labels, &mask, ds.schema().favorable_label()).map_err(
        |e| match e {
            Error::UndefinedRate { notion, group } => Error::UndefinedRate {
                notion,
                group: format!("{group} ({} != {})", attr.column, attr.privileged),
            },
            other => other,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toy_statistical_parity() {
        // unprivileged rate 1/2, privileged 1/1
        let preds = [1, 0, 1, 1];
        let mask = [false, false, true, true];
        assert_eq!(statistical_parity_difference(&preds, &mask, 1).unwrap(), -0.5);
        assert_eq!(statistical_parity_difference(&[3, 3, 3, 3], &mask, 1).unwrap(), 0.0);
    }

    #[test]
    fn toy_equal_opportunity() {
        // unprivileged TPR 2/3, privileged 1/3
        let labels = [1, 1, 1, 1, 1, 1];
        let preds = [1, 1, 0, 1, 0, 0];
        let mask = [false, false, false, true, true, true];
        let v = equal_opportunity_difference(&preds, &labels, &mask, 1).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn toy_calibration() {
        // PPV 1/2 on both sides
        let preds = [1, 1, 1, 1];
        let labels = [1, 0, 0, 1];
        let mask = [false, false, true, true];
        assert_eq!(calibration_difference(&preds, &labels, &mask, 1).unwrap(), 0.0);
    }

    #[test]
    fn empty_group_is_an_error() {
        let err = statistical_parity_difference(&[1, 0], &[true, true], 1).unwrap_err();
        assert!(matches!(err, Error::UndefinedRate { ref group, .. } if group == "unprivileged"));
        let err = calibration_difference(&[0, 0], &[1, 1], &[false, true], 1).unwrap_err();
        assert!(matches!(err, Error::UndefinedRate { .. }));
    }

    #[test]
    fn coarse_check() {
        assert!(satisfies_coarse(-0.05, 0.1));
        assert!(!satisfies_coarse(0.12, 0.1));
        assert!(satisfies_coarse(0.0, 0.0));
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            statistical_parity_difference(&[1, 0], &[true], 1),
            Err(Error::LengthMismatch { .. })
        ));
    }
}
