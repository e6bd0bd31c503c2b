//! Running replicates and sweeps, and analysing what they produce.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::checks::{oracle_check, OracleReport};
use super::spec::{ExperimentSpec, OutputKind};
use crate::boundary::BoundaryKind;
use crate::engine::{RunRecord, RunStats, Simulation, Snapshot};
use crate::error::{Error, Result};
use crate::ledger::MoneyMode;
use crate::rules::RuleSpec;
use crate::seed::{replicate_seed, sweep_point_seed};
use crate::stats::{
    entropy_per_agent, fit_bounded_exponential, fit_exponential, fit_gamma, fit_two_sided,
    max_entropy_reference, stationarity_detector, tail_exponent_hill, BoundedExponentialFit,
    FitResult, HillEstimate, MoneyHistogram, StationarityParams, StationarityVerdict, TwoSidedFit,
};

/// Fits and verdicts for one balance sample.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub bin_width: f64,
    pub entropy: Option<f64>,
    /// Entropy of the maximum-entropy histogram with the same mean, grid
    /// and floor.
    pub max_entropy: Option<f64>,
    pub exponential: Option<FitResult>,
    pub gamma: Option<FitResult>,
    pub two_sided: Option<TwoSidedFit>,
    pub bounded: Option<BoundedExponentialFit>,
    pub tail: Option<HillEstimate>,
    pub stationarity: Option<StationarityVerdict>,
    /// Analyses that could not be carried out, with the reason.
    pub skipped: Vec<String>,
}

/// Closed-form temperatures for the configured boundary.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Theory {
    pub temperature: Option<f64>,
    pub positive_temperature: Option<f64>,
    pub negative_temperature: Option<f64>,
}

impl Theory {
    pub fn for_spec(spec: &ExperimentSpec) -> Self {
        let sim = &spec.simulation;
        let mean = sim.initial_balance;
        if sim.boundary.interest.is_some() || sim.boundary.bankruptcy_threshold.is_some() {
            return Theory::default();
        }
        match sim.boundary.kind {
            BoundaryKind::NoDebt => Theory {
                temperature: Some(mean),
                ..Theory::default()
            },
            BoundaryKind::DebtCap { max_debt } => Theory {
                temperature: Some(mean + max_debt),
                ..Theory::default()
            },
            BoundaryKind::ReserveRatio { ratio } => Theory {
                temperature: None,
                positive_temperature: Some(mean / ratio),
                negative_temperature: Some(mean * (1.0 - ratio) / ratio),
            },
            _ => Theory::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub index: u32,
    pub seed: u64,
    pub final_mean: f64,
    pub final_variance: f64,
    pub conservation_residual: f64,
    pub loans_outstanding: f64,
    pub interest_created: f64,
    pub stats: RunStats,
    pub analysis: Analysis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// The results document of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub schema_version: u32,
    pub config_hash: String,
    pub master_seed: u64,
    pub seed_derivation: String,
    pub replicates: Vec<ReplicateSummary>,
    pub pooled: Analysis,
    pub theory: Theory,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleReport>,
    pub assertions: Vec<AssertionOutcome>,
    pub passed: bool,
}

/// An experiment's results plus the raw runs behind them.
pub struct ExperimentRun {
    pub spec: ExperimentSpec,
    pub result: ExperimentResult,
    pub records: Vec<RunRecord>,
    pub pooled_histogram: MoneyHistogram,
}

fn support_shift(spec: &ExperimentSpec) -> Option<f64> {
    spec.analysis
        .support_shift
        .or_else(|| spec.simulation.boundary.floor())
}

fn stationarity_params(spec: &ExperimentSpec) -> StationarityParams {
    spec.analysis.stationarity.unwrap_or_else(|| {
        let sweeps = spec.simulation.sweeps.max(1);
        StationarityParams {
            window: (sweeps / 10).max(spec.simulation.snapshot_every),
            ..StationarityParams::default()
        }
    })
}

/// Fit and summarize `pooled` balances; `snapshots` feed the stationarity
/// detector.
pub fn analyze(spec: &ExperimentSpec, pooled: &[f64], snapshots: Option<&[Snapshot]>) -> Analysis {
    let bin_width = spec.simulation.effective_bin_width();
    let policy = &spec.simulation.boundary;
    let mut a = Analysis {
        samples: pooled.len(),
        bin_width,
        ..Analysis::default()
    };
    if pooled.is_empty() {
        a.skipped.push("no samples".into());
        return a;
    }
    let hist = MoneyHistogram::from_samples(pooled, bin_width);
    a.mean = hist.sample_mean();
    a.variance = hist.sample_variance();
    a.entropy = entropy_per_agent(&hist).ok();

    let note = |what: &str, e: Error| a_skip(what, e);
    let shift = support_shift(spec);
    match (shift, policy.ceiling()) {
        (Some(floor), Some(ceiling)) => match fit_bounded_exponential(pooled, floor, ceiling) {
            Ok(f) => a.bounded = Some(f),
            Err(e) => a.skipped.push(note("bounded exponential", e)),
        },
        (Some(floor), None) => {
            a.max_entropy = Some(max_entropy_reference(&hist, floor));
            match fit_exponential(pooled, floor) {
                Ok(f) => a.exponential = Some(f),
                Err(e) => a.skipped.push(note("exponential", e)),
            }
            if floor == 0.0 {
                match fit_gamma(pooled) {
                    Ok(f) => a.gamma = Some(f),
                    Err(e) => a.skipped.push(note("gamma", e)),
                }
            }
        }
        (None, _) => match fit_two_sided(pooled) {
            Ok(f) => a.two_sided = Some(f),
            Err(e) => a.skipped.push(note("two-sided exponential", e)),
        },
    }
    if spec.wants(OutputKind::Tail) {
        match tail_exponent_hill(pooled, spec.analysis.tail_fraction) {
            Ok(h) => a.tail = Some(h),
            Err(e) => a.skipped.push(note("tail", e)),
        }
    }
    if let (true, Some(snaps)) = (spec.wants(OutputKind::Stationarity), snapshots) {
        match stationarity_detector(snaps, &stationarity_params(spec)) {
            Ok(v) => a.stationarity = Some(v),
            Err(e) => a.skipped.push(note("stationarity", e)),
        }
    }
    a
}

fn a_skip(what: &str, e: Error) -> String {
    format!("{what}: {e}")
}

fn run_replicate(spec: &ExperimentSpec, index: u32) -> Result<(ReplicateSummary, RunRecord)> {
    let mut sim = Simulation::new(&spec.simulation, u64::from(index))?;
    let record = sim.run()?;
    let pooled = record.pooled_balances(spec.analysis.average_last);
    let analysis = analyze(spec, &pooled, Some(&record.snapshots));
    let last = &record.last().histogram;
    let summary = ReplicateSummary {
        index,
        seed: replicate_seed(spec.simulation.seed, u64::from(index)),
        final_mean: last.sample_mean(),
        final_variance: last.sample_variance(),
        conservation_residual: sim.ledger.conservation_residual(),
        loans_outstanding: sim.ledger.bank().loans_outstanding,
        interest_created: sim.ledger.external_flux(),
        stats: record.stats.clone(),
        analysis,
    };
    Ok((summary, record))
}

fn evaluate(spec: &ExperimentSpec, result: &ExperimentResult) -> Vec<AssertionOutcome> {
    let Some(exp) = &spec.expectations else {
        return Vec::new();
    };
    let mut out = Vec::new();
    let mut check = |name: &str, passed: bool, detail: String| {
        out.push(AssertionOutcome {
            name: name.into(),
            passed,
            detail,
        })
    };
    let fit = result.pooled.exponential.as_ref();
    if let Some([lo, hi]) = exp.temperature_range {
        match fit.and_then(|f| f.temperature) {
            Some(t) => check(
                "temperature_range",
                t >= lo && t <= hi,
                format!("T = {t} in [{lo}, {hi}]"),
            ),
            None => check("temperature_range", false, "no exponential fit".into()),
        }
    }
    if let Some(max) = exp.max_ks {
        match fit {
            Some(f) => check("max_ks", f.ks < max, format!("KS = {} < {max}", f.ks)),
            None => check("max_ks", false, "no exponential fit".into()),
        }
    }
    if let Some(want) = exp.stationary {
        let verdicts: Vec<Option<bool>> = result
            .replicates
            .iter()
            .map(|r| r.analysis.stationarity.as_ref().map(|v| v.stationary))
            .collect();
        let ok = verdicts.iter().all(|v| *v == Some(want));
        check(
            "stationary",
            ok,
            format!("verdicts {verdicts:?}, expected {want}"),
        );
    }
    if let Some([lo, hi]) = exp.tail_density_exponent_range {
        match &result.pooled.tail {
            Some(h) => {
                let d = h.density_exponent();
                check(
                    "tail_density_exponent_range",
                    d >= lo && d <= hi,
                    format!("{d} in [{lo}, {hi}]"),
                )
            }
            None => check(
                "tail_density_exponent_range",
                false,
                "no tail estimate".into(),
            ),
        }
    }
    out
}

/// Run every replicate of `spec` (concurrently on the current rayon pool)
/// and analyse them individually and pooled.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentRun> {
    spec.validate()?;
    let runs: Vec<(ReplicateSummary, RunRecord)> = (0..spec.replicates)
        .into_par_iter()
        .map(|i| run_replicate(spec, i))
        .collect::<Result<_>>()?;
    let (replicates, records): (Vec<_>, Vec<_>) = runs.into_iter().unzip();

    let mut pooled_balances = Vec::new();
    let mut pooled_histogram = MoneyHistogram::new(spec.simulation.effective_bin_width());
    for r in &records {
        pooled_balances.extend(r.pooled_balances(spec.analysis.average_last));
        pooled_histogram.merge(&r.pooled_histogram(spec.analysis.average_last))?;
    }
    let pooled = analyze(spec, &pooled_balances, None);

    let oracle = if spec.wants(OutputKind::OracleCheck) {
        Some(oracle_for(spec)?)
    } else {
        None
    };

    let mut result = ExperimentResult {
        schema_version: spec.schema_version,
        config_hash: spec.config_hash(),
        master_seed: spec.simulation.seed,
        seed_derivation:
            "replicate seed = splitmix64(splitmix64(master) ^ index * 0xD1B54A32D192ED03)".into(),
        replicates,
        pooled,
        theory: Theory::for_spec(spec),
        oracle,
        assertions: Vec::new(),
        passed: true,
    };
    result.assertions = evaluate(spec, &result);
    result.passed = result.assertions.iter().all(|a| a.passed)
        && result.oracle.as_ref().is_none_or(|o| o.passed);
    Ok(ExperimentRun {
        spec: spec.clone(),
        result,
        records,
        pooled_histogram,
    })
}

fn oracle_for(spec: &ExperimentSpec) -> Result<OracleReport> {
    let sim = &spec.simulation;
    let fixed_unit = matches!(sim.rule, RuleSpec::FixedAmount { amount } if amount == 1.0);
    if !(fixed_unit
        && sim.money_mode == MoneyMode::Integer
        && sim.boundary.kind == BoundaryKind::NoDebt)
    {
        return Err(Error::Config(
            "oracle_check needs fixed_amount 1, integer money and no_debt".into(),
        ));
    }
    let money = (sim.initial_balance as u64) * sim.num_agents as u64;
    oracle_check(sim.num_agents, money, sim.sweeps.max(1), sim.seed)
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub index: usize,
    pub assignments: BTreeMap<String, Value>,
    pub master_seed: u64,
    pub result: ExperimentResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config_hash: String,
    pub points: Vec<SweepPoint>,
    pub passed: bool,
}

/// Every combination of the sweep axes, in row-major order (last axis
/// fastest).
pub fn sweep_assignments(spec: &ExperimentSpec) -> Vec<BTreeMap<String, Value>> {
    let mut combos = vec![BTreeMap::new()];
    for axis in &spec.sweep_axes {
        combos = combos
            .into_iter()
            .flat_map(|c| {
                axis.values.iter().map(move |v| {
                    let mut c = c.clone();
                    c.insert(axis.path.clone(), v.clone());
                    c
                })
            })
            .collect();
    }
    combos
}

/// Run the grid of `spec.sweep_axes`. Each point gets its own master seed.
pub fn run_sweep(spec: &ExperimentSpec) -> Result<(SweepResult, Vec<ExperimentRun>)> {
    spec.validate()?;
    let points: Vec<(usize, BTreeMap<String, Value>, ExperimentSpec)> = sweep_assignments(spec)
        .into_iter()
        .enumerate()
        .map(|(i, assign)| {
            let mut s = spec.clone();
            for (path, v) in &assign {
                s = s.with_value(path, v)?;
            }
            s.sweep_axes.clear();
            s.simulation.seed = sweep_point_seed(spec.simulation.seed, i as u64);
            Ok((i, assign, s))
        })
        .collect::<Result<_>>()?;
    let runs: Vec<(SweepPoint, ExperimentRun)> = points
        .into_par_iter()
        .map(|(index, assignments, s)| {
            let run = run_experiment(&s)?;
            Ok((
                SweepPoint {
                    index,
                    assignments,
                    master_seed: s.simulation.seed,
                    result: run.result.clone(),
                },
                run,
            ))
        })
        .collect::<Result<_>>()?;
    let (points, runs): (Vec<_>, Vec<_>) = runs.into_iter().unzip();
    let passed = points.iter().all(|p| p.result.passed);
    Ok((
        SweepResult {
            config_hash: spec.config_hash(),
            points,
            passed,
        },
        runs,
    ))
}
