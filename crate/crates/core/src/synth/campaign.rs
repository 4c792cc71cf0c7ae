use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    check_group_threshold, check_individual_threshold, check_group_transfer, check_individual_transfer, check_individual_converse,
    random_instance, FiniteInstance, Outcome, Q,
};
use crate::error::Result;
use crate::metrics::Notion;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignConfig {
    pub seed: u64,
    pub instances: usize,
    pub max_points: usize,
    pub max_labels: i64,
    pub max_dim: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 0,
            instances: 1000,
            max_points: 30,
            max_labels: 10,
            max_dim: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckSummary {
    pub check: String,
    pub passed: usize,
    pub skipped: usize,
    pub violations: usize,
    pub violation_seeds: Vec<u64>,
    /// First few counterexample descriptions.
    pub examples: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CampaignReport {
    pub evidence: &'static str,
    pub config: CampaignConfig,
    pub checks: Vec<CheckSummary>,
    pub total_violations: usize,
}

const EVIDENCE: &str = "exhaustive over finite empirical instances, exact rational arithmetic";

const CHECKS: [&str; 10] = [
    "individual_transfer",
    "individual_converse",
    "statistical_parity_transfer",
    "equal_opportunity_transfer",
    "calibration_transfer",
    "individual_threshold",
    "statistical_parity_threshold",
    "equal_opportunity_threshold",
    "calibration_threshold",
    "triangle_chain",
];

fn instance_seed(campaign: u64, index: u64) -> u64 {
    // SplitMix64 step: well-spread, platform independent.
    let mut z = campaign
        .wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sized_instance(cfg: &CampaignConfig, seed: u64) -> Result<FiniteInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED);
    let n = rng.gen_range(2..=cfg.max_points.max(2));
    let labels = rng.gen_range(2..=cfg.max_labels.max(2));
    let dim = rng.gen_range(1..=cfg.max_dim.max(1));
    random_instance(seed, n, labels, dim)
}

/// Merges several outcomes of one check on one instance.
fn combine(outcomes: Vec<Outcome>) -> Outcome {
    if outcomes.iter().all(Outcome::is_skipped) {
        return outcomes
            .into_iter()
            .next()
            .unwrap_or(Outcome::Skipped("no cases".into()));
    }
    Outcome::Checked(
        outcomes
            .into_iter()
            .flat_map(|o| o.violations().to_vec())
            .collect(),
    )
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn run_instance(inst: &FiniteInstance) -> Result<Vec<Outcome>> {
    let m = Q::from(inst.max_gap());
    let epsilons = [m + q(1, 4), m + q(1, 1), m + q(5, 2)];
    let kappas = [q(1, 1), q(2, 1)];
    let mut out = Vec::with_capacity(CHECKS.len());

    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut c1 = Vec::new();
    for &k in &kappas {
        let spread = Q::from(inst.max_close_spread(&inst.f, k));
        for &e in &epsilons {
            p1.push(check_individual_transfer(inst, k, e)?);
        }
        for &e in &epsilons[..2] {
            for delta in [spread - q(1, 2), spread / 2, Q::from(0)] {
                if delta >= Q::from(0) {
                    p2.push(check_individual_converse(inst, k, delta, e)?);
                }
            }
        }
        for margin in [q(1, 2), m * 2 + q(1, 1), m * 2 + q(3, 1)] {
            c1.push(check_individual_threshold(inst, k, spread + margin)?);
        }
    }
    out.push(combine(p1));
    out.push(combine(p2));
    for notion in Notion::ALL {
        let cases = epsilons
            .iter()
            .map(|&e| check_group_transfer(inst, e, notion))
            .collect::<Result<Vec<_>>>()?;
        out.push(combine(cases));
    }
    out.push(combine(c1));
    for notion in Notion::ALL {
        let cases = [q(1, 10), q(1, 2), q(1, 1)]
            .iter()
            .map(|&margin| check_group_threshold(inst, m + q(1, 2), margin, notion))
            .collect::<Result<Vec<_>>>()?;
        out.push(combine(cases));
    }
    out.push(triangle_chain(inst));
    Ok(out)
}

/// `|d(g1, g2) - d(f1, f2)| <= d(g1, f1) + d(g2, f2)` on every pair.
fn triangle_chain(inst: &FiniteInstance) -> Outcome {
    Outcome::Checked(
        inst.pairs()
            .filter(|&(i, j)| {
                let dg = (inst.g[i] - inst.g[j]).abs();
                let df = (inst.f[i] - inst.f[j]).abs();
                (dg - df).abs() > (inst.g[i] - inst.f[i]).abs() + (inst.g[j] - inst.f[j]).abs()
            })
            .map(|(i, j)| format!("pair ({i}, {j})"))
            .collect(),
    )
}

/// Runs every check on `cfg.instances` seeded instances.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignReport> {
    let results: Vec<(u64, Vec<Outcome>)> = (0..cfg.instances as u64)
        .into_par_iter()
        .map(|i| {
            let seed = instance_seed(cfg.seed, i);
            let inst = sized_instance(cfg, seed)?;
            Ok((seed, run_instance(&inst)?))
        })
        .collect::<Result<_>>()?;

    let mut checks: Vec<CheckSummary> = CHECKS
        .iter()
        .map(|name| CheckSummary {
            check: name.to_string(),
            passed: 0,
            skipped: 0,
            violations: 0,
            violation_seeds: vec![],
            examples: vec![],
        })
        .collect();
    for (seed, outcomes) in &results {
        for (summary, outcome) in checks.iter_mut().zip(outcomes) {
            match outcome {
                Outcome::Skipped(_) => summary.skipped += 1,
                Outcome::Checked(v) if v.is_empty() => summary.passed += 1,
                Outcome::Checked(v) => {
                    summary.violations += 1;
                    summary.violation_seeds.push(*seed);
                    if summary.examples.len() < 5 {
                        summary.examples.push(format!("seed {seed}: {}", v[0]));
                    }
                }
            }
        }
    }
    let total_violations = checks.iter().map(|c| c.violations).sum();
    Ok(CampaignReport {
        evidence: EVIDENCE,
        config: cfg.clone(),
        checks,
        total_violations,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarialReport {
    pub pair_budget: u64,
    pub pairs_examined: u64,
    pub instances: usize,
    pub violations: usize,
    pub violation_seeds: Vec<u64>,
}

/// An instance where every row of `g` sits at the maximal allowed gap from
/// `f` and ε exceeds that gap by a sliver, the tightest case for the bounds.
fn tight_instance(seed: u64) -> Result<(FiniteInstance, Q)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=40);
    let labels = rng.gen_range(2..=10);
    let dim = rng.gen_range(1..=3);
    let mut inst = random_instance(seed, n, labels, dim)?;
    let r = rng.gen_range(0..labels);
    inst.g = inst
        .f
        .iter()
        .map(|&y| {
            let up = y + r;
            let down = y - r;
            match (up < labels, down >= 0) {
                (true, true) if rng.gen_bool(0.5) => up,
                (true, _) => up,
                (_, true) => down,
                _ => y,
            }
        })
        .collect();
    let epsilon = Q::from(inst.max_gap()) + q(1, 1000);
    Ok((inst, epsilon))
}

/// Randomized search for counterexamples to the individual bounds, stopping
/// once `pair_budget` input pairs have been examined.
pub fn adversarial_search(seed: u64, pair_budget: u64) -> Result<AdversarialReport> {
    const BATCH: u64 = 256;
    let mut report = AdversarialReport {
        pair_budget,
        pairs_examined: 0,
        instances: 0,
        violations: 0,
        violation_seeds: vec![],
    };
    let mut next = 0u64;
    while report.pairs_examined < pair_budget {
        let batch: Vec<(u64, u64, bool)> = (next..next + BATCH)
            .into_par_iter()
            .map(|i| {
                let s = instance_seed(seed ^ 0xAD5E, i);
                let (inst, eps) = tight_instance(s)?;
                let mut bad = false;
                let mut pairs = 0u64;
                for k in [q(1, 1), q(2, 1), q(3, 1)] {
                    pairs += inst.pairs().count() as u64 * 2;
                    bad |= !check_individual_transfer(&inst, k, eps)?.violations().is_empty();
                    let spread = Q::from(inst.max_close_spread(&inst.f, k));
                    let delta = spread - q(1, 1000);
                    if delta >= Q::from(0) {
                        bad |= !check_individual_converse(&inst, k, delta, eps)?.violations().is_empty();
                    }
                }
                Ok((s, pairs, bad))
            })
            .collect::<Result<_>>()?;
        next += BATCH;
        for (s, pairs, bad) in batch {
            if report.pairs_examined >= pair_budget {
                break;
            }
            report.pairs_examined += pairs;
            report.instances += 1;
            if bad {
                report.violations += 1;
                report.violation_seeds.push(s);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_campaign_is_clean_and_deterministic() {
        let cfg = CampaignConfig {
            instances: 50,
            seed: 3,
            ..CampaignConfig::default()
        };
        let a = run_campaign(&cfg).unwrap();
        assert_eq!(a.total_violations, 0, "{:?}", a.checks);
        assert_eq!(a, run_campaign(&cfg).unwrap());
        for c in &a.checks {
            assert_eq!(c.passed + c.skipped + c.violations, 50, "{}", c.check);
        }
    }

    #[test]
    fn empty_campaign() {
        let cfg = CampaignConfig {
            instances: 0,
            ..CampaignConfig::default()
        };
        let r = run_campaign(&cfg).unwrap();
        assert_eq!(r.total_violations, 0);
        assert!(r.checks.iter().all(|c| c.passed == 0 && c.skipped == 0));
    }

    #[test]
    fn adversarial_budget_is_respected() {
        let r = adversarial_search(1, 10_000).unwrap();
        assert!(r.pairs_examined >= 10_000);
        assert_eq!(r.violations, 0);
    }
}
