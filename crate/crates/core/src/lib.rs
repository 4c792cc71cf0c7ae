//! Auditor-relative fairness auditing for tabular classifiers.
//!
//! A human auditor's notion of a deserved outcome is written down as an
//! ordered rule set ([`auditor::RuleSet`]). A system is compared against it
//! point by point (ε-noncomparative fairness) and the result is related to
//! the classic comparative notions: statistical parity, equal opportunity,
//! calibration and (κ, δ)-individual fairness.
//!
//! * [`tabular`] loads CSV data and runs the COMPAS, Adult and German credit
//!   preparation recipes.
//! * [`metrics`] computes group metrics, Mahalanobis distances and the
//!   pairwise individual-fairness scan.
//! * [`auditor`] parses and applies rule files and measures pointwise
//!   distance between a system and an auditor.
//! * [`bounds`] holds the transfer bounds, threshold corollaries and the
//!   system-versus-auditor report.
//! * [`synth`] checks the bounds by brute force on small finite instances
//!   using exact rational arithmetic.
//! * [`cli`] wires everything into the `ncfair` command.

pub mod auditor;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod metrics;
pub mod report;
pub mod synth;
pub mod tabular;

pub use error::{Error, Result};

/// Class label produced by a classifier or rule set.
pub type Label = i64;
