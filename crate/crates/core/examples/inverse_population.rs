// Cap the balance from above and put the mean near the cap: the fitted
// exponential gets a negative rate (negative temperature), with more agents
// near the top. At half the cap the distribution is flat.

use econophys::stats::{fit_bounded_exponential, log_linear_slope, MoneyHistogram};
use econophys::{simulate, BoundaryPolicy, RuleSpec, SimConfig};

pub fn run_example() -> econophys::Result<()> {
    let cap = 1200.0;
    for mean in [300.0, 600.0, 1000.0] {
        let config = SimConfig::new(
            500,
            mean,
            RuleSpec::UniformRandomFraction,
            BoundaryPolicy::upper_bound(cap),
        )
        .sweeps(10_000)
        .snapshot_every(100)
        .seed(9);
        let pooled = simulate(&config)?.pooled_balances(100);
        let fit = fit_bounded_exponential(&pooled, 0.0, cap)?;
        let slope = log_linear_slope(&MoneyHistogram::from_samples(&pooled, 50.0), cap / 2.0, cap)?;
        println!(
            "mean {mean:>6}: rate = {:+.2e}, KS = {:.4}, d ln P/dm (upper half) = {slope:+.2e}",
            fit.rate, fit.ks
        );
    }
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
