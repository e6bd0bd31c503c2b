// Money exchange with random amounts relaxes to an exponential
// distribution whose temperature is the mean money per agent.
//
//     cargo run --example boltzmann_gibbs

use econophys::stats::{fit_exponential, MoneyHistogram};
use econophys::{simulate, BoundaryPolicy, RuleSpec, SimConfig};

pub fn run_example() -> econophys::Result<()> {
    let config = SimConfig::new(
        500,
        1000.0,
        RuleSpec::UniformRandomFraction,
        BoundaryPolicy::no_debt(),
    )
    .sweeps(20_000)
    .snapshot_every(100)
    .seed(7);
    let record = simulate(&config)?;

    // Average the last 100 snapshots to beat down the noise of N = 500.
    let pooled = record.pooled_balances(100);
    let fit = fit_exponential(&pooled, 0.0)?;
    let t = fit.temperature.unwrap_or(f64::NAN);
    println!("{} samples, T = {t:.1}, KS = {:.4}", fit.samples, fit.ks);

    let hist = MoneyHistogram::from_samples(&pooled, 250.0);
    println!("{:>8} {:>10} {:>10}", "m", "P(m)", "exp");
    for (k, p) in hist.probabilities().iter().enumerate().take(12) {
        let (lo, hi) = (hist.bin_left(k), hist.bin_left(k) + 250.0);
        let model = (-lo / t).exp() - (-hi / t).exp();
        println!("{lo:>8.0} {p:>10.5} {model:>10.5}");
    }
    assert!((t - 1000.0).abs() < 50.0 && fit.ks < 0.02);
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
