// For a handful of agents and integer money the whole Markov chain fits in
// memory. Its stationary vector gives every composition equal weight,
// which a long Monte Carlo run reproduces.

use econophys::harness::oracle_check;
use econophys::stats::oracle::{composition_count, enumerate_oracle};

pub fn run_example() -> econophys::Result<()> {
    let exact = enumerate_oracle(3, 4)?;
    println!(
        "3 agents, 4 units: {} states, solved in {} iterations",
        exact.states, exact.iterations
    );
    for (s, p) in exact.state_probabilities.iter().enumerate().take(5) {
        println!("  state {s}: {p:.6}");
    }

    for (agents, money) in [(2, 2), (3, 6), (5, 20)] {
        let report = oracle_check(agents, money, 200_000, 1)?;
        println!(
            "N = {agents}, M = {money:>2}: {:>5} states (C = {}), formula gap {:.1e}, MC KS {:.4}, {}",
            report.states,
            composition_count(agents as u64, money),
            report.max_abs_enumerated_vs_formula,
            report.ks_monte_carlo_vs_enumerated,
            if report.passed { "ok" } else { "MISMATCH" }
        );
    }

    match enumerate_oracle(10, 40) {
        Err(e) => println!("N = 10, M = 40: {e}"),
        Ok(_) => unreachable!("the state space is far past the limit"),
    }
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
