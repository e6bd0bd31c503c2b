use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use econophys::harness::{self, output, ExperimentSpec, ORACLE_KS_TOLERANCE};
use econophys::Error;

/// Money-exchange Monte Carlo experiments.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output directory (defaults to the config's `output_dir`, then `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit with status 2 when a configured expectation fails.
    #[arg(long)]
    assert: bool,
    /// Worker threads for replicates and sweep points.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every replicate of an experiment.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run the grid spanned by the config's `sweep_axes`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the master equation described by the config's `kinetic` block.
    Kinetic {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Fit a histogram CSV written by `run`.
    Fit {
        /// A `bin_left,count[,probability]` CSV.
        #[arg(long)]
        input: PathBuf,
        /// Lower edge of the exponential fit.
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Compare Monte Carlo, exact enumeration and the closed form on a tiny
    /// system.
    Oracle {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        agents: usize,
        #[arg(long, default_value_t = 6)]
        money: u64,
        #[arg(long, default_value_t = 200_000)]
        sweeps: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Usage(String),
    Assertion(String),
    Output(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => Failure::Output(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

fn load(path: &Path) -> Result<ExperimentSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    ExperimentSpec::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn out_dir(common: &Common, spec: Option<&ExperimentSpec>) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| spec.and_then(|s| s.output_dir.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn prepare(dir: &Path) -> Result<(), Failure> {
    output::prepare_output_dir(dir).map_err(|e| Failure::Output(e.to_string()))
}

fn verdict(assert: bool, passed: bool, what: &str) -> Result<(), Failure> {
    if assert && !passed {
        Err(Failure::Assertion(format!(
            "{what} failed its expectations"
        )))
    } else {
        Ok(())
    }
}

fn setup_threads(common: &Common) -> Result<(), Failure> {
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Failure::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run { config, common } => {
            setup_threads(&common)?;
            let spec = load(&config)?;
            let dir = out_dir(&common, Some(&spec));
            prepare(&dir)?;
            let run = harness::run_experiment(&spec)?;
            report(&output::write_experiment(&dir, &run)?);
            for a in &run.result.assertions {
                println!(
                    "{} {}: {}",
                    if a.passed { "PASS" } else { "FAIL" },
                    a.name,
                    a.detail
                );
            }
            verdict(common.assert, run.result.passed, "run")
        }
        Command::Sweep { config, common } => {
            setup_threads(&common)?;
            let spec = load(&config)?;
            if spec.sweep_axes.is_empty() {
                return Err(Failure::Usage("config has no sweep_axes".into()));
            }
            let dir = out_dir(&common, Some(&spec));
            prepare(&dir)?;
            let (result, runs) = harness::run_sweep(&spec)?;
            report(&output::write_sweep(&dir, &result, &runs)?);
            verdict(common.assert, result.passed, "sweep")
        }
        Command::Kinetic { config, common } => {
            setup_threads(&common)?;
            let spec = load(&config)?;
            let kinetic = spec
                .kinetic
                .as_ref()
                .ok_or_else(|| Failure::Usage("config has no `kinetic` block".into()))?;
            let dir = out_dir(&common, Some(&spec));
            prepare(&dir)?;
            let (grid, rep) = harness::run_kinetic(kinetic)?;
            report(&output::write_kinetic(
                &dir,
                &grid,
                &rep,
                &spec.config_hash(),
            )?);
            println!(
                "converged={} steps={} ks_to_exponential={:.3e} detailed_balance={:.3e}",
                rep.solve.converged,
                rep.solve.steps,
                rep.ks_to_exponential,
                rep.detailed_balance.max_residual
            );
            verdict(common.assert, rep.solve.converged, "kinetic solve")
        }
        Command::Fit {
            input,
            shift,
            common,
        } => {
            setup_threads(&common)?;
            let dir = out_dir(&common, None);
            prepare(&dir)?;
            let hist = harness::read_histogram_csv(&input)?;
            let fit = harness::fit_histogram(&hist, shift);
            report(&output::write_fit(&dir, &fit)?);
            if let Some(f) = &fit.exponential {
                println!("exponential: T={:?} ks={:.4}", f.temperature, f.ks);
            }
            if let Some(f) = &fit.gamma {
                println!("gamma: alpha={:?} ks={:.4}", f.alpha, f.ks);
            }
            for s in &fit.skipped {
                println!("skipped {s}");
            }
            verdict(common.assert, fit.exponential.is_some(), "fit")
        }
        Command::Oracle {
            config,
            agents,
            money,
            sweeps,
            seed,
            common,
        } => {
            setup_threads(&common)?;
            let (spec, params) = match config {
                Some(path) => {
                    let spec = load(&path)?;
                    let sim = &spec.simulation;
                    let params = (
                        sim.num_agents,
                        (sim.initial_balance as u64) * sim.num_agents as u64,
                        sim.sweeps,
                        sim.seed,
                    );
                    (Some(spec), params)
                }
                None => (None, (agents, money, sweeps, seed)),
            };
            let dir = out_dir(&common, spec.as_ref());
            prepare(&dir)?;
            let (agents, money, sweeps, seed) = params;
            if sweeps == 0 {
                return Err(Failure::Usage("oracle needs at least one sweep".into()));
            }
            let rep = harness::oracle_check(agents, money, sweeps, seed)?;
            let hash = spec.map(|s| s.config_hash()).unwrap_or_default();
            report(&output::write_oracle(&dir, &rep, &hash)?);
            println!(
                "states={} ks={:.4} (tolerance {ORACLE_KS_TOLERANCE}) formula_gap={:.2e}",
                rep.states, rep.ks_monte_carlo_vs_enumerated, rep.max_abs_enumerated_vs_formula
            );
            verdict(common.assert, rep.passed, "oracle check")
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Assertion(msg)) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Output(msg)) => {
            eprintln!("cannot write output: {msg}");
            ExitCode::from(3)
        }
    }
}
