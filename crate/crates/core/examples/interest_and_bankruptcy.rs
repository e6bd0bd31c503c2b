// Interest and bankruptcy add and remove money at sweep boundaries. The
// ledger keeps track of both, so the total still balances.

use econophys::{BoundaryPolicy, RuleSpec, SimConfig, Simulation};

pub fn run_example() -> econophys::Result<()> {
    // Deposits earn 0.01% per sweep, debt grows 0.05% per sweep, and anyone
    // more than 480 in debt is wiped clean.
    let policy = BoundaryPolicy::debt_cap(500.0)
        .with_interest(1e-4, 5e-4)
        .with_bankruptcy(480.0);
    let config = SimConfig::new(200, 1000.0, RuleSpec::UniformRandomFraction, policy)
        .sweeps(200)
        .snapshot_every(50)
        .seed(31);
    let mut sim = Simulation::new(&config, 0)?;
    let record = sim.run()?;
    let ledger = &sim.ledger;
    let written_off = ledger.bank().written_off;
    println!(
        "bankruptcies: {}, debt written off: {:.1}",
        record.stats.bankruptcies, record.stats.erased_debt
    );
    println!("interest flux: {:.1}", ledger.external_flux());
    println!(
        "total {:.3} = base {:.1} + interest {:.3} + written off {:.3} (residual {:.1e})",
        ledger.total_money(),
        ledger.monetary_base(),
        ledger.external_flux(),
        written_off,
        ledger.conservation_residual()
    );
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
