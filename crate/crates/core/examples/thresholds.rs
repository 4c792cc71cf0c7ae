//! Transfer bounds and the ε thresholds they imply, in floating point and in
//! exact rationals.

use num_rational::Ratio;

use ncfair::bounds::{
    accepts, epsilon_threshold_group, epsilon_threshold_individual, group_transfer, IFBound,
};

fn main() -> ncfair::Result<()> {
    let b = IFBound::new(0.1, 0.5)?;
    println!("auditor (κ, 0.5)-fair, gap ε = 0.1: system is (κ, {})-fair; not better than {}", b.forward, b.converse);

    let t = epsilon_threshold_individual(0.5, 1.0)?;
    for observed in [0.2, 0.25, 0.3] {
        println!("target δ′ = 1, threshold {t}: observed ε {observed} -> {}", if accepts(observed, t) { "accept" } else { "reject" });
    }

    // Exact: -0.05 + 2 · (-0.12) · 1 = -0.29 with no rounding.
    let q = |n, d| Ratio::<i64>::new(n, d);
    let upper = group_transfer(q(1, 1), q(-5, 100), q(-12, 100))?;
    println!("group bound {upper} = {:.2}", *upper.numer() as f64 / *upper.denom() as f64);
    println!("group threshold for δ = 1/10, δ′ = 3/10, M = 1/2: {}", epsilon_threshold_group(q(1, 10), q(3, 10), q(1, 2))?);

    match epsilon_threshold_individual(0.3, 0.2) {
        Err(e) => println!("infeasible: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
