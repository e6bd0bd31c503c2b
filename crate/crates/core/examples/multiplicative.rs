// Paying a fixed fraction of the payer's balance gives a Gamma-like law
// that vanishes at zero instead of an exponential.

use econophys::stats::{fit_exponential, fit_gamma, MoneyHistogram};
use econophys::{simulate, BoundaryPolicy, RuleSpec, SimConfig};

pub fn run_example() -> econophys::Result<()> {
    let config = SimConfig::new(
        500,
        1000.0,
        RuleSpec::Multiplicative { gamma: 1.0 / 3.0 },
        BoundaryPolicy::no_debt(),
    )
    .sweeps(20_000)
    .snapshot_every(100)
    .seed(3);
    let pooled = simulate(&config)?.pooled_balances(100);
    let gamma = fit_gamma(&pooled)?;
    let exp = fit_exponential(&pooled, 0.0)?;
    println!(
        "gamma fit: beta = {:.2}, scale = {:.0}, KS = {:.4}",
        gamma.beta.unwrap(),
        gamma.temperature.unwrap(),
        gamma.ks
    );
    println!(
        "exponential fit: T = {:.0}, KS = {:.4}",
        exp.temperature.unwrap(),
        exp.ks
    );

    let hist = MoneyHistogram::from_samples(&pooled, 50.0);
    println!(
        "P(first bin) = {:.4}, exponential would give {:.4}",
        hist.probability_at(0.0),
        1.0 - (-0.05f64).exp()
    );
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
