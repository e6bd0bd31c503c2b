// Agents that keep a fraction `lambda` of their money out of every trade.
// A common `lambda` lifts the distribution off zero; propensities drawn
// per agent from `U[0, 1)` produce a Pareto tail `P(m) ~ m^-2`.

use econophys::rules::DEFAULT_LAMBDA_MAX;
use econophys::stats::{fit_gamma, tail_exponent_hill, MoneyHistogram};
use econophys::{simulate, BoundaryPolicy, RuleSpec, SimConfig};

pub fn run_example() -> econophys::Result<()> {
    for lambda in [0.0, 0.25, 0.5, 0.9] {
        let config = SimConfig::new(
            500,
            1000.0,
            RuleSpec::SavingPropensity { lambda },
            BoundaryPolicy::no_debt(),
        )
        .sweeps(5_000)
        .snapshot_every(50)
        .seed(21);
        let pooled = simulate(&config)?.pooled_balances(100);
        let min = pooled.iter().cloned().fold(f64::INFINITY, f64::min);
        let hist = MoneyHistogram::from_samples(&pooled, 50.0);
        let fit = fit_gamma(&pooled)?;
        println!(
            "lambda = {lambda:<4}: min {min:>7.1}, P(first bin) {:.4}, gamma beta {:.2}",
            hist.probability_at(0.0),
            fit.beta.unwrap()
        );
    }

    let config = SimConfig::new(
        1000,
        1000.0,
        RuleSpec::RandomSavingPropensity {
            lambda_max: DEFAULT_LAMBDA_MAX,
        },
        BoundaryPolicy::no_debt(),
    )
    .sweeps(30_000)
    .snapshot_every(1000)
    .seed(22);
    let pooled = simulate(&config)?.pooled_balances(20);
    let hill = tail_exponent_hill(&pooled, 0.05)?;
    println!(
        "random lambda: Hill density exponent {:.2} from the top {} of {} samples (m > {:.0})",
        hill.density_exponent(),
        hill.k,
        pooled.len(),
        hill.threshold
    );
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
