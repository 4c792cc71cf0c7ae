//! Brute-force checks of the transfer bounds on small finite instances.
//!
//! An instance is a handful of points on an integer grid, a privileged /
//! unprivileged split, an auditor lookup table `f`, a system `g` obtained by
//! perturbing `f`, and ground-truth labels. Every probability is a ratio of
//! counts held as `Ratio<i64>`, and input distances are compared squared, so
//! every comparison below is exact.

mod campaign;

use num_rational::Ratio;
use num_traits::Signed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{
    epsilon_threshold_group, epsilon_threshold_individual, group_transfer, if_converse,
    if_transfer,
};
use crate::error::{Error, Result};
use crate::metrics::Notion;
use crate::Label;

pub use campaign::{
    adversarial_search, run_campaign, AdversarialReport, CampaignConfig, CampaignReport,
    CheckSummary,
};

pub type Q = Ratio<i64>;

/// Largest grid coordinate of generated points.
const GRID: i64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteInstance {
    pub seed: u64,
    pub label_count: i64,
    pub features: Vec<Vec<i64>>,
    /// `true` for the privileged group.
    pub privileged: Vec<bool>,
    pub f: Vec<Label>,
    pub g: Vec<Label>,
    pub truth: Vec<Label>,
}

impl FiniteInstance {
    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    /// Squared Euclidean input distance.
    pub fn dist_sq(&self, i: usize, j: usize) -> i64 {
        self.features[i]
            .iter()
            .zip(&self.features[j])
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    pub fn is_close(&self, i: usize, j: usize, kappa: Q) -> bool {
        Q::from(self.dist_sq(i, j)) <= kappa * kappa
    }

    /// `max_x |g(x) - f(x)|`.
    pub fn max_gap(&self) -> i64 {
        self.g.iter().zip(&self.f).map(|(a, b)| (a - b).abs()).max().unwrap_or(0)
    }

    /// Whether `g` is ε-noncomparatively fair w.r.t. `f`.
    pub fn nc_fair(&self, epsilon: Q) -> bool {
        Q::from(self.max_gap()) < epsilon
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
    }

    /// Largest `|h(x1) - h(x2)|` over κ-close pairs, 0 when there are none.
    pub fn max_close_spread(&self, h: &[Label], kappa: Q) -> i64 {
        self.pairs()
            .filter(|&(i, j)| self.is_close(i, j, kappa))
            .map(|(i, j)| (h[i] - h[j]).abs())
            .max()
            .unwrap_or(0)
    }
}

/// A deterministic instance. `g` differs from `f` by at most a random
/// per-instance radius; labels are `0..label_count`.
pub fn random_instance(
    seed: u64,
    n: usize,
    label_count: i64,
    feature_dim: usize,
) -> Result<FiniteInstance> {
    if n < 2 || label_count < 2 || feature_dim == 0 {
        return Err(Error::InvalidArgument(format!(
            "instance needs n >= 2, label_count >= 2 and feature_dim >= 1 \
             (got {n}, {label_count}, {feature_dim})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = (0..n)
        .map(|_| (0..feature_dim).map(|_| rng.gen_range(0..=GRID)).collect())
        .collect();
    let mut privileged: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    // Both groups nonempty.
    let flip = rng.gen_range(0..n);
    if privileged.iter().all(|&p| p) || privileged.iter().all(|&p| !p) {
        privileged[flip] = !privileged[flip];
    }
    let f: Vec<Label> = (0..n).map(|_| rng.gen_range(0..label_count)).collect();
    let radius = rng.gen_range(0..label_count.min(3));
    let g = f
        .iter()
        .map(|&y| (y + rng.gen_range(-radius..=radius)).clamp(0, label_count - 1))
        .collect();
    let truth = (0..n).map(|_| rng.gen_range(0..label_count)).collect();
    Ok(FiniteInstance {
        seed,
        label_count,
        features,
        privileged,
        f,
        g,
        truth,
    })
}

/// Result of one check on one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// The preconditions did not hold; nothing was checked.
    Skipped(String),
    /// Descriptions of every counterexample found (empty when the bound held).
    Checked(Vec<String>),
}

impl Outcome {
    pub fn violations(&self) -> &[String] {
        match self {
            Outcome::Skipped(_) => &[],
            Outcome::Checked(v) => v,
        }
    }

    pub fn is_skipped(&self) -> bool {
        matches!(self, Outcome::Skipped(_))
    }
}

fn skip(reason: impl Into<String>) -> Result<Outcome> {
    Ok(Outcome::Skipped(reason.into()))
}

/// `f` is `(κ, δ)`-fair with δ its largest spread over κ-close pairs; with `g`
/// ε-close to `f`, every κ-close pair must have `d(g) < 2ε + δ`.
pub fn check_individual_transfer(inst: &FiniteInstance, kappa: Q, epsilon: Q) -> Result<Outcome> {
    if !inst.nc_fair(epsilon) {
        return skip("g is not ε-noncomparatively fair");
    }
    let delta = Q::from(inst.max_close_spread(&inst.f, kappa));
    let bound = if_transfer(epsilon, delta)?;
    Ok(Outcome::Checked(
        inst.pairs()
            .filter(|&(i, j)| inst.is_close(i, j, kappa))
            .filter(|&(i, j)| Q::from((inst.g[i] - inst.g[j]).abs()) >= bound)
            .map(|(i, j)| format!("pair ({i}, {j}): d(g) = {} >= {bound}", (inst.g[i] - inst.g[j]).abs()))
            .collect(),
    ))
}

/// When `f` has a κ-close pair with `d(f) > δ` and `g` is ε-close to `f`,
/// some κ-close pair must have `d(g) > δ - 2ε`.
pub fn check_individual_converse(inst: &FiniteInstance, kappa: Q, delta: Q, epsilon: Q) -> Result<Outcome> {
    if !inst.nc_fair(epsilon) {
        return skip("g is not ε-noncomparatively fair");
    }
    let f_violates = inst
        .pairs()
        .any(|(i, j)| inst.is_close(i, j, kappa) && Q::from((inst.f[i] - inst.f[j]).abs()) > delta);
    if !f_violates {
        return skip("f is (κ, δ)-individually fair");
    }
    let level = if_converse(epsilon, delta)?;
    let witnessed = inst
        .pairs()
        .any(|(i, j)| inst.is_close(i, j, kappa) && Q::from((inst.g[i] - inst.g[j]).abs()) > level);
    Ok(Outcome::Checked(if witnessed {
        vec![]
    } else {
        vec![format!("no κ-close pair with d(g) > {level}")]
    }))
}

/// `(hits, support)` for one group under a notion, with `truth` as labels.
fn counts(
    inst: &FiniteInstance,
    pred: &[Label],
    notion: Notion,
    fav: Label,
    privileged: bool,
) -> (i64, i64) {
    let mut hits = 0;
    let mut support = 0;
    for ((&pk, &yk), &group) in pred.iter().zip(&inst.truth).zip(&inst.privileged) {
        if group != privileged {
            continue;
        }
        let (p, y) = (pk == fav, yk == fav);
        let (in_event, hit) = match notion {
            Notion::StatisticalParity => (true, p),
            Notion::EqualOpportunity => (y, p),
            Notion::Calibration => (p, y),
        };
        if in_event {
            support += 1;
            hits += i64::from(hit);
        }
    }
    (hits, support)
}

/// Rates for (unprivileged, privileged), `None` if either is undefined.
fn rates(inst: &FiniteInstance, pred: &[Label], notion: Notion, fav: Label) -> Option<(Q, Q)> {
    let rate = |p| {
        let (h, s) = counts(inst, pred, notion, fav, p);
        (s > 0).then(|| Q::new(h, s))
    };
    Some((rate(false)?, rate(true)?))
}

/// Per favorable label: `|metric(g)| <= 2 M̂ ε + |metric(f)|` with
/// `M̂ ε = max_a |p(g, a) - p(f, a)|`.
pub fn check_group_transfer(inst: &FiniteInstance, epsilon: Q, notion: Notion) -> Result<Outcome> {
    if !inst.nc_fair(epsilon) {
        return skip("g is not ε-noncomparatively fair");
    }
    let mut checked = false;
    let mut violations = Vec::new();
    for fav in 0..inst.label_count {
        let (Some((gu, gp)), Some((fu, fp))) =
            (rates(inst, &inst.g, notion, fav), rates(inst, &inst.f, notion, fav))
        else {
            continue;
        };
        checked = true;
        let delta = (fu - fp).abs();
        let m_hat = (gu - fu).abs().max((gp - fp).abs()) / epsilon;
        let bound = group_transfer(epsilon, delta, m_hat)?;
        let lhs = (gu - gp).abs();
        if lhs > bound {
            violations.push(format!("{notion}, favorable {fav}: {lhs} > {bound}"));
        }
        // The three-step triangle chain behind the bound, term by term.
        let chain = (gu - fu).abs() + (fu - fp).abs() + (fp - gp).abs();
        if lhs > chain {
            violations.push(format!("{notion}, favorable {fav}: triangle chain {lhs} > {chain}"));
        }
    }
    if checked {
        Ok(Outcome::Checked(violations))
    } else {
        skip("every rate is undefined")
    }
}

/// Threshold form of the individual bound: if the observed gap is below
/// `(δ′ - δ) / 2`, every κ-close pair has `d(g) < δ′`.
pub fn check_individual_threshold(inst: &FiniteInstance, kappa: Q, delta_prime: Q) -> Result<Outcome> {
    let delta = Q::from(inst.max_close_spread(&inst.f, kappa));
    let threshold = match epsilon_threshold_individual(delta, delta_prime) {
        Ok(t) => t,
        Err(Error::InfeasibleThreshold(m)) => return skip(m),
        Err(e) => return Err(e),
    };
    if Q::from(inst.max_gap()) >= threshold {
        return skip("auditor rejected by the threshold");
    }
    Ok(Outcome::Checked(
        inst.pairs()
            .filter(|&(i, j)| inst.is_close(i, j, kappa))
            .filter(|&(i, j)| Q::from((inst.g[i] - inst.g[j]).abs()) >= delta_prime)
            .map(|(i, j)| format!("pair ({i}, {j}) reaches δ′ = {delta_prime}"))
            .collect(),
    ))
}

/// Threshold form of the group bound with `M = M̂`: an accepted `g` has
/// `|metric(g)| < δ′`.
pub fn check_group_threshold(
    inst: &FiniteInstance,
    epsilon: Q,
    delta_prime_margin: Q,
    notion: Notion,
) -> Result<Outcome> {
    if !inst.nc_fair(epsilon) {
        return skip("g is not ε-noncomparatively fair");
    }
    let mut checked = false;
    let mut violations = Vec::new();
    for fav in 0..inst.label_count {
        let (Some((gu, gp)), Some((fu, fp))) =
            (rates(inst, &inst.g, notion, fav), rates(inst, &inst.f, notion, fav))
        else {
            continue;
        };
        let delta = (fu - fp).abs();
        let delta_prime = delta + delta_prime_margin;
        let m_hat = (gu - fu).abs().max((gp - fp).abs()) / epsilon;
        let threshold = match epsilon_threshold_group(delta, delta_prime, m_hat) {
            Ok(t) => t,
            Err(Error::InfeasibleThreshold(_)) => continue,
            Err(e) => return Err(e),
        };
        if epsilon >= threshold {
            continue;
        }
        checked = true;
        let lhs = (gu - gp).abs();
        if lhs >= delta_prime {
            violations.push(format!("{notion}, favorable {fav}: {lhs} >= δ′ = {delta_prime}"));
        }
    }
    if checked {
        Ok(Outcome::Checked(violations))
    } else {
        skip("no favorable label with an accepting threshold")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn instances_are_deterministic() {
        let a = random_instance(7, 10, 2, 3).unwrap();
        let b = random_instance(7, 10, 2, 3).unwrap();
        assert_eq!(a, b);
        assert!(a.privileged.iter().any(|&p| p) && a.privileged.iter().any(|&p| !p));
        assert_ne!(a, random_instance(8, 10, 2, 3).unwrap());
    }

    #[test]
    fn two_points_have_one_pair() {
        let inst = random_instance(3, 2, 2, 1).unwrap();
        assert_eq!(inst.pairs().count(), 1);
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(random_instance(0, 1, 2, 1).is_err());
        assert!(random_instance(0, 5, 1, 1).is_err());
        assert!(random_instance(0, 5, 2, 0).is_err());
    }

    #[test]
    fn regression_instance() {
        let inst = random_instance(1, 50, 10, 4).unwrap();
        assert_eq!(inst.len(), 50);
        let fingerprint = (
            inst.max_gap(),
            inst.f.iter().sum::<i64>(),
            inst.g.iter().sum::<i64>(),
            inst.privileged.iter().filter(|&&p| p).count(),
            inst.features.iter().flatten().sum::<i64>(),
        );
        assert_eq!(fingerprint, REGRESSION_FINGERPRINT);
    }
    // Pinned from a first run: (max gap, sum f, sum g, privileged, sum features).
    const REGRESSION_FINGERPRINT: (i64, i64, i64, usize, i64) = (0, 253, 253, 28, 290);

    fn identity_instance(seed: u64) -> FiniteInstance {
        let mut inst = random_instance(seed, 12, 4, 2).unwrap();
        inst.g = inst.f.clone();
        inst
    }

    #[test]
    fn identical_systems_pass_everything() {
        for seed in 0..20 {
            let inst = identity_instance(seed);
            assert!(check_individual_transfer(&inst, q(1, 1), q(1, 2)).unwrap().violations().is_empty());
            for notion in Notion::ALL {
                let out = check_group_transfer(&inst, q(1, 3), notion).unwrap();
                assert!(out.violations().is_empty());
            }
        }
    }

    #[test]
    fn converse_vacuous_below_zero_and_witnessed_at_identity() {
        let inst = identity_instance(5);
        let kappa = q(2, 1);
        let spread = inst.max_close_spread(&inst.f, kappa);
        if spread > 0 {
            let delta = Q::from(spread - 1);
            // Smallest label gap is 1; with g = f any ε in (0, 1] keeps ε-closeness.
            assert_eq!(check_individual_converse(&inst, kappa, delta, q(1, 1)).unwrap(), Outcome::Checked(vec![]));
            assert_eq!(check_individual_converse(&inst, kappa, delta, Q::from(spread)).unwrap(), Outcome::Checked(vec![]));
        }
    }

    #[test]
    fn skips_when_preconditions_fail() {
        let mut inst = random_instance(11, 10, 5, 2).unwrap();
        inst.g = inst.f.iter().map(|&y| if y == 0 { 4 } else { 0 }).collect();
        assert!(check_individual_transfer(&inst, q(1, 1), q(1, 2)).unwrap().is_skipped());
        assert!(check_group_transfer(&inst, q(1, 2), Notion::Calibration).unwrap().is_skipped());
    }
}
