//! Self-checks that need no simulation config: the exact small-system
//! oracle, the master-equation run and fitting a histogram read from disk.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::spec::KineticSpec;
use crate::boundary::BoundaryPolicy;
use crate::engine::{RunOptions, Simulation};
use crate::error::{Error, Result};
use crate::kinetic::{
    detailed_balance_residual, discrete_exponential, kernel_symmetry_check, stationary_solve,
    DetailedBalanceReport, KernelSymmetry, KineticGrid, SolveReport,
};
use crate::ledger::{AgentLedger, MoneyMode, SimConfig};
use crate::rules::RuleSpec;
use crate::stats::{
    composition_marginal, enumerate_oracle, fit_exponential, fit_gamma, ks_discrete, FitResult,
    MoneyHistogram,
};

/// Largest KS distance tolerated between the Monte Carlo marginal and the
/// enumerated one.
pub const ORACLE_KS_TOLERANCE: f64 = 0.02;

/// Largest gap tolerated between the enumerated marginal and the
/// composition-count formula.
pub const FORMULA_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub agents: usize,
    pub money: u64,
    pub states: usize,
    pub sweeps: u64,
    /// `P(m)` for `m = 0..=money` from each method.
    pub enumerated: Vec<f64>,
    pub formula: Vec<f64>,
    pub monte_carlo: Vec<f64>,
    pub max_abs_enumerated_vs_formula: f64,
    pub ks_monte_carlo_vs_enumerated: f64,
    pub passed: bool,
}

/// Compare the single-agent marginal three ways for `agents` agents sharing
/// `money` units: the stationary vector of the enumerated chain, the
/// composition-count formula, and a unit-transfer Monte Carlo run of
/// `sweeps` sweeps (the first tenth discarded).
pub fn oracle_check(agents: usize, money: u64, sweeps: u64, seed: u64) -> Result<OracleReport> {
    let exact = enumerate_oracle(agents, money)?;
    let formula = composition_marginal(agents as u64, money);
    let max_abs = exact
        .marginal
        .iter()
        .zip(&formula)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let (initial, remainder) = (money / agents as u64, money % agents as u64);
    let config = SimConfig::new(
        agents,
        initial as f64,
        RuleSpec::FixedAmount { amount: 1.0 },
        BoundaryPolicy::no_debt(),
    )
    .integer()
    .seed(seed);
    let mut sim = Simulation::new(&config, 0)?;
    // Spread any remainder one unit at a time so the total is exact.
    let start: Vec<f64> = (0..agents)
        .map(|a| (initial + u64::from((a as u64) < remainder)) as f64)
        .collect();
    sim.ledger = AgentLedger::from_balances(start, config.boundary, MoneyMode::Integer)?;
    let burn_in = sweeps / 10;
    let options = RunOptions {
        snapshot_every: 1,
        bin_width: 1.0,
        keep_balances: true,
    };
    sim.run_with(burn_in, &options)?;
    let record = sim.run_with(sweeps - burn_in, &options)?;
    let mut counts = vec![0u64; money as usize + 1];
    for s in &record.snapshots[1..] {
        for &m in &s.balances {
            counts[m as usize] += 1;
        }
    }
    let total: u64 = counts.iter().sum();
    let monte_carlo: Vec<f64> = counts
        .iter()
        .map(|&c| c as f64 / total.max(1) as f64)
        .collect();
    let ks = ks_discrete(&monte_carlo, &exact.marginal);
    Ok(OracleReport {
        agents,
        money,
        states: exact.states,
        sweeps,
        passed: ks < ORACLE_KS_TOLERANCE && max_abs < FORMULA_TOLERANCE,
        enumerated: exact.marginal,
        formula,
        monte_carlo,
        max_abs_enumerated_vs_formula: max_abs,
        ks_monte_carlo_vs_enumerated: ks,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticReport {
    pub solve: SolveReport,
    pub mean: f64,
    pub detailed_balance: DetailedBalanceReport,
    pub kernel_symmetry: KernelSymmetry,
    /// KS distance to the discrete exponential of the same mean.
    pub ks_to_exponential: f64,
}

/// Relax the delta distribution described by `spec` to its stationary state.
pub fn run_kinetic(spec: &KineticSpec) -> Result<(KineticGrid, KineticReport)> {
    let mut grid = KineticGrid::delta(
        spec.floor,
        spec.step,
        spec.points,
        spec.initial_money,
        spec.kernel.clone(),
    )?;
    let solve = stationary_solve(&mut grid, &spec.solve)?;
    let reference = discrete_exponential(grid.points(), grid.mean_index());
    let report = KineticReport {
        solve,
        mean: grid.mean(),
        detailed_balance: detailed_balance_residual(&grid),
        kernel_symmetry: kernel_symmetry_check(&spec.kernel, grid.points()),
        ks_to_exponential: ks_discrete(&grid.probs, &reference),
    };
    Ok((grid, report))
}

/// Read a `bin_left,count[,probability]` histogram written by `run`.
/// Lines starting with `#` are skipped.
pub fn read_histogram_csv(path: &Path) -> Result<MoneyHistogram> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let field = |k: usize, name: &str| -> Result<&str> {
            rec.get(k)
                .ok_or_else(|| Error::Usage(format!("{}: missing `{name}` column", path.display())))
        };
        let left: f64 = field(0, "bin_left")?
            .parse()
            .map_err(|e| Error::Usage(format!("{}: bad bin_left: {e}", path.display())))?;
        let count: u64 = field(1, "count")?
            .parse()
            .map_err(|e| Error::Usage(format!("{}: bad count: {e}", path.display())))?;
        rows.push((left, count));
    }
    if rows.len() < 2 {
        return Err(Error::Usage(format!(
            "{}: need at least two bins",
            path.display()
        )));
    }
    let width = rows[1].0 - rows[0].0;
    if !(width > 0.0) {
        return Err(Error::Usage(format!(
            "{}: bins must be increasing",
            path.display()
        )));
    }
    let mut counts = Vec::with_capacity(rows.len());
    for (k, &(left, count)) in rows.iter().enumerate() {
        let expected = rows[0].0 + k as f64 * width;
        if (left - expected).abs() > 1e-6 * width.max(1.0) {
            return Err(Error::Usage(format!(
                "{}: bins are not evenly spaced at row {}",
                path.display(),
                k + 1
            )));
        }
        counts.push(count);
    }
    MoneyHistogram::from_counts(width, rows[0].0, counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OfflineFit {
    pub bins: usize,
    pub samples: u64,
    pub exponential: Option<FitResult>,
    pub gamma: Option<FitResult>,
    pub skipped: Vec<String>,
}

/// Fit an exponential (shifted to `shift`) and a Gamma law to a histogram,
/// treating each count as that many samples at the bin centre.
pub fn fit_histogram(hist: &MoneyHistogram, shift: f64) -> OfflineFit {
    let samples = hist.center_samples();
    let mut out = OfflineFit {
        bins: hist.num_bins(),
        samples: hist.total(),
        exponential: None,
        gamma: None,
        skipped: Vec::new(),
    };
    match fit_exponential(&samples, shift) {
        Ok(f) => out.exponential = Some(f),
        Err(e) => out.skipped.push(format!("exponential: {e}")),
    }
    match fit_gamma(&samples) {
        Ok(f) => out.gamma = Some(f),
        Err(e) => out.skipped.push(format!("gamma: {e}")),
    }
    out
}
