// Without any limit on debt the distribution spreads forever: the
// variance keeps growing and the stationarity detector never fires,
// while the mean stays exactly where it started.

use econophys::stats::{stationarity_detector, window_series, StationarityParams};
use econophys::{simulate, BoundaryPolicy, RuleSpec, SimConfig};

pub fn run_example() -> econophys::Result<()> {
    let sweeps = 20_000;
    let config = SimConfig::new(
        500,
        1000.0,
        RuleSpec::UniformRandomFraction,
        BoundaryPolicy::unlimited(),
    )
    .sweeps(sweeps)
    .snapshot_every(50)
    .seed(13);
    let record = simulate(&config)?;
    let window = sweeps / 10;
    for p in window_series(&record.snapshots, window)? {
        println!(
            "sweep {:>6}: mean {:>9.3}  std {:>9.1}",
            p.sweep,
            p.mean,
            p.variance.sqrt()
        );
    }
    let verdict = stationarity_detector(
        &record.snapshots,
        &StationarityParams {
            window,
            ..StationarityParams::default()
        },
    )?;
    println!(
        "stationary: {} (adjacent KS {:.3?})",
        verdict.stationary, verdict.adjacent_distances
    );

    // The same detector on a no-debt run does fire.
    let config = SimConfig::new(
        500,
        1000.0,
        RuleSpec::UniformRandomFraction,
        BoundaryPolicy::no_debt(),
    )
    .sweeps(sweeps)
    .snapshot_every(10)
    .seed(13);
    let verdict = stationarity_detector(
        &simulate(&config)?.snapshots,
        &StationarityParams {
            window,
            epsilon: 0.02,
            consecutive: 3,
        },
    )?;
    println!(
        "no debt: stationary {} from sweep {:?}",
        verdict.stationary, verdict.stationary_from_sweep
    );
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
