//! Brute-force the transfer bounds on small random instances with exact
//! arithmetic, then try to break the individual bounds adversarially.

use ncfair::synth::{adversarial_search, run_campaign, CampaignConfig};

fn main() -> ncfair::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let report = run_campaign(&CampaignConfig { seed, instances: 300, ..CampaignConfig::default() })?;
    println!("{} ({} instances, seed {seed})", report.evidence, report.config.instances);
    for c in &report.checks {
        println!("  {:<36} passed {:>4}  skipped {:>4}  violations {}", c.check, c.passed, c.skipped, c.violations);
    }
    let adv = adversarial_search(seed, 200_000)?;
    println!(
        "adversarial: {} instances, {} pairs, {} violations",
        adv.instances, adv.pairs_examined, adv.violations
    );
    Ok(())
}
