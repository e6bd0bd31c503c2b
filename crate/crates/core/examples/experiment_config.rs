// Drive everything from a JSON document: replicates, expectations, a
// parameter sweep and the CSV/JSON files the CLI would write.

use econophys::harness::{output, run_experiment, run_sweep, ExperimentSpec};

const SPEC: &str = r#"{
    "schema_version": 1,
    "simulation": {
        "num_agents": 500,
        "initial_balance": 1000,
        "rule": {"type": "uniform_random_fraction"},
        "boundary": {"type": "reserve_ratio", "ratio": 0.8},
        "sweeps": 5000,
        "seed": 42,
        "snapshot_every": 50
    },
    "replicates": 2,
    "outputs": ["fits", "entropy_series", "stationarity"],
    "analysis": {"average_last": 50},
    "sweep_axes": [{"path": "simulation.boundary.ratio", "values": [0.5, 0.8, 1.0]}]
}"#;

pub fn run_example() -> econophys::Result<()> {
    let spec = ExperimentSpec::parse(SPEC).map_err(|e| econophys::Error::Config(e.to_string()))?;
    println!("config hash {}", spec.config_hash());

    let single = ExperimentSpec {
        sweep_axes: Vec::new(),
        ..spec.clone()
    };
    let run = run_experiment(&single)?;
    for r in &run.result.replicates {
        let fit = r.analysis.two_sided.as_ref();
        println!(
            "replicate {} (seed {:#018x}): T+ = {:.1}, T- = {:.1}",
            r.index,
            r.seed,
            fit.map_or(f64::NAN, |f| f.positive_temperature),
            fit.map_or(f64::NAN, |f| f.negative_temperature)
        );
    }

    let (sweep, runs) = run_sweep(&spec)?;
    for p in &sweep.points {
        println!(
            "{:?}: predicted T+ = {:?}",
            p.assignments, p.result.theory.positive_temperature
        );
    }

    let dir = std::env::temp_dir().join("econophys-experiment-example");
    for path in output::write_sweep(&dir, &sweep, &runs)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn main() -> econophys::Result<()> {
    run_example()
}
