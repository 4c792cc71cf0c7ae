//! Transfer bounds from an auditor's fairness to a system that stays within
//! ε of it, the matching ε thresholds, and the system-versus-auditor tables.
//!
//! The arithmetic is generic over [`Scalar`] so the same functions run on
//! `f64` for reports and on exact rationals in the brute-force harness.

mod table;

use std::fmt::Display;

use num_traits::{Num, Signed};
use serde::Serialize;

use crate::error::{Error, Result};

pub use table::{
    table1_rows, table2_row, table2_row_from_outputs, AuditorMetricRow, TransferBoundReport,
};

/// Numbers the bound arithmetic runs on.
pub trait Scalar: Num + Signed + Copy + PartialOrd + Display {}

impl<T: Num + Signed + Copy + PartialOrd + Display> Scalar for T {}

fn two<T: Scalar>() -> T {
    T::one() + T::one()
}

fn nonnegative<T: Scalar>(name: &str, v: T) -> Result<()> {
    if v < T::zero() {
        Err(Error::InvalidArgument(format!("{name} must be nonnegative, got {v}")))
    } else {
        Ok(())
    }
}

/// Individual fairness carried from the auditor to the system: `2ε + δ`.
pub fn if_transfer<T: Scalar>(epsilon: T, delta: T) -> Result<T> {
    nonnegative("ε", epsilon)?;
    nonnegative("δ", delta)?;
    Ok(two::<T>() * epsilon + delta)
}

/// Level the system cannot reach when the auditor is not `(κ, δ)`-fair:
/// `δ - 2ε`. May be negative, in which case it says nothing.
pub fn if_converse<T: Scalar>(epsilon: T, delta: T) -> Result<T> {
    nonnegative("ε", epsilon)?;
    nonnegative("δ", delta)?;
    Ok(delta - two::<T>() * epsilon)
}

/// Group-notion level carried to the system: `2Mε + δ`. `M` and `δ` may be
/// signed.
pub fn group_transfer<T: Scalar>(epsilon: T, delta: T, m: T) -> Result<T> {
    nonnegative("ε", epsilon)?;
    Ok(two::<T>() * m * epsilon + delta)
}

/// Empirical Lipschitz constant `(p(g, a) - p(f, a)) / ε`, signed.
pub fn estimate_m<T: Scalar>(system_rate: T, auditor_rate: T, epsilon: T) -> Result<T> {
    if epsilon <= T::zero() {
        return Err(Error::InvalidArgument(format!("ε must be positive, got {epsilon}")));
    }
    Ok((system_rate - auditor_rate) / epsilon)
}

fn check_targets<T: Scalar>(delta: T, delta_prime: T) -> Result<()> {
    nonnegative("δ", delta)?;
    if delta_prime <= delta {
        return Err(Error::InfeasibleThreshold(format!(
            "target δ′ = {delta_prime} must exceed the benchmark level δ = {delta}"
        )));
    }
    Ok(())
}

/// Largest ε (exclusive) keeping `2ε + δ` below `δ′`: `(δ′ - δ) / 2`.
pub fn epsilon_threshold_individual<T: Scalar>(delta: T, delta_prime: T) -> Result<T> {
    check_targets(delta, delta_prime)?;
    Ok((delta_prime - delta) / two())
}

/// Largest ε (exclusive) keeping `2Mε + δ` below `δ′`: `(δ′ - δ) / (2M)`.
pub fn epsilon_threshold_group<T: Scalar>(delta: T, delta_prime: T, m: T) -> Result<T> {
    if m <= T::zero() {
        return Err(Error::InfeasibleThreshold(format!(
            "the threshold needs a positive Lipschitz constant, got M = {m}"
        )));
    }
    check_targets(delta, delta_prime)?;
    Ok((delta_prime - delta) / (two::<T>() * m))
}

/// Whether an observed noncomparative gap is strictly below a threshold.
pub fn accepts<T: Scalar>(observed_epsilon: T, threshold: T) -> bool {
    observed_epsilon < threshold
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IFBound<T> {
    pub epsilon: T,
    pub delta: T,
    /// `2ε + δ`
    pub forward: T,
    /// `δ - 2ε`
    pub converse: T,
}

impl<T: Scalar> IFBound<T> {
    pub fn new(epsilon: T, delta: T) -> Result<Self> {
        Ok(IFBound {
            epsilon,
            delta,
            forward: if_transfer(epsilon, delta)?,
            converse: if_converse(epsilon, delta)?,
        })
    }

    /// The ε below which the auditor is `(κ, δ′)`-fair.
    pub fn threshold(&self, delta_prime: T) -> Result<T> {
        epsilon_threshold_individual(self.delta, delta_prime)
    }
}
