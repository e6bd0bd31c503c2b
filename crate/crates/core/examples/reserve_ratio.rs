// A bank that lends against a required reserve ratio `R` caps total debt
// at `M_b (1 - R) / R`. Once lending saturates, positive money per agent
// is `M_b / (R N)` and debt per agent `M_b (1 - R) / (R N)`.

use econophys::stats::{fit_two_sided, two_sided_max_entropy_slopes};
use econophys::{BoundaryPolicy, RuleSpec, SimConfig, Simulation};

pub fn run_example() -> econophys::Result<()> {
    println!(
        "{:>4} {:>8} {:>8} {:>8} {:>8} {:>10}",
        "R", "T+", "pred", "T-", "pred", "loans/cap"
    );
    for ratio in [0.5, 0.8, 1.0] {
        let config = SimConfig::new(
            500,
            1000.0,
            RuleSpec::UniformRandomFraction,
            BoundaryPolicy::reserve_ratio(ratio),
        )
        .sweeps(20_000)
        .snapshot_every(100)
        .seed(5);
        let mut sim = Simulation::new(&config, 0)?;
        let record = sim.run()?;
        let bank = sim.ledger.bank();
        let pooled = record.pooled_balances(100);
        let fill = if bank.loan_cap > 0.0 {
            bank.loans_outstanding / bank.loan_cap
        } else {
            f64::NAN
        };
        match fit_two_sided(&pooled) {
            Ok(fit) => {
                println!(
                    "{ratio:>4} {:>8.1} {:>8.1} {:>8.1} {:>8.1} {fill:>10.3}",
                    fit.positive_temperature,
                    1000.0 / ratio,
                    fit.negative_temperature,
                    1000.0 * (1.0 - ratio) / ratio,
                );
                let (pos, neg) = two_sided_max_entropy_slopes(
                    fit.positive_temperature,
                    fit.negative_temperature,
                );
                println!(
                    "     decay lengths {:.0} / {:.0}, max-entropy {pos:.0} / {neg:.0}",
                    fit.positive_slope, fit.negative_slope
                );
            }
            // R = 1 forbids lending altogether: nothing on the negative side.
            Err(_) => println!(
                "{ratio:>4} no debt at all (mean {:.1})",
                sim.ledger.mean_money()
            ),
        }
    }
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
