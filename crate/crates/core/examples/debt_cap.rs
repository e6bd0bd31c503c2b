// Allowing each agent to borrow up to `m_d` shifts the exponential down to
// `-m_d` and raises the temperature to `mean + m_d`.

use econophys::stats::fit_exponential;
use econophys::{simulate, BoundaryPolicy, RuleSpec, SimConfig};

pub fn run_example() -> econophys::Result<()> {
    for max_debt in [0.0, 400.0, 800.0] {
        let policy = if max_debt == 0.0 {
            BoundaryPolicy::no_debt()
        } else {
            BoundaryPolicy::debt_cap(max_debt)
        };
        let config = SimConfig::new(500, 1000.0, RuleSpec::UniformRandomFraction, policy)
            .sweeps(20_000)
            .snapshot_every(100)
            .seed(11);
        let record = simulate(&config)?;
        let pooled = record.pooled_balances(100);
        let fit = fit_exponential(&pooled, -max_debt)?;
        let debtors = pooled.iter().filter(|&&m| m < 0.0).count() as f64 / pooled.len() as f64;
        println!(
            "m_d = {max_debt:>4}: T = {:>7.1} (expected {:>6}), KS = {:.4}, in debt {:.1}%",
            fit.temperature.unwrap(),
            1000.0 + max_debt,
            fit.ks,
            100.0 * debtors
        );
    }
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
