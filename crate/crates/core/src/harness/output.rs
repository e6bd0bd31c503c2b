//! Files written by the harness. Every CSV starts with a `#` line naming the
//! units and the config hash it came from.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::checks::{KineticReport, OfflineFit, OracleReport};
use super::experiment::{ExperimentRun, SweepResult};
use super::spec::OutputKind;
use crate::error::{Error, Result};
use crate::kinetic::KineticGrid;
use crate::stats::{entropy_per_agent, MoneyHistogram};

/// Create `dir` (and parents) and make sure a file can be written there.
pub fn prepare_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(dir, e))?;
    let _ = fs::remove_file(probe);
    Ok(())
}

fn write(path: PathBuf, contents: &str) -> Result<PathBuf> {
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(path: PathBuf, value: &T) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write(path, &text)
}

fn header(units: &str, hash: &str) -> String {
    format!("# units: {units}; config_hash: {hash}\n")
}

fn csv_body(rows: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    rows(&mut w)?;
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io("<csv buffer>", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn histogram_csv(hist: &MoneyHistogram, hash: &str) -> Result<String> {
    let body = csv_body(|w| {
        w.write_record(["bin_left", "count", "probability"])?;
        let probs = hist.probabilities();
        for (k, (&c, p)) in hist.counts().iter().zip(probs).enumerate() {
            w.serialize((hist.bin_left(k), c, p))?;
        }
        Ok(())
    })?;
    Ok(header("money (bin_left), agents (count)", hash) + &body)
}

/// Largest gap between the histogram's CDF at bin edges and an exponential
/// with the histogram's own mean above `floor`.
fn ks_to_exponential(hist: &MoneyHistogram, floor: f64) -> f64 {
    let t = hist.sample_mean() - floor;
    if !(t > 0.0) {
        return f64::NAN;
    }
    hist.cdf_at_right_edges()
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let edge = hist.bin_left(k) + hist.bin_width();
            let model = if edge > floor {
                1.0 - (-(edge - floor) / t).exp()
            } else {
                0.0
            };
            (f - model).abs()
        })
        .fold(0.0, f64::max)
}

/// Per-snapshot entropy, temperature and exponential KS, with each snapshot
/// pooled across replicates.
pub fn series_csv(run: &ExperimentRun) -> Result<String> {
    let floor = run.spec.simulation.boundary.floor().unwrap_or(0.0);
    let n = run
        .records
        .iter()
        .map(|r| r.snapshots.len())
        .min()
        .unwrap_or(0);
    let body = csv_body(|w| {
        w.write_record(["sweep", "entropy", "temperature", "ks_to_exponential"])?;
        for k in 0..n {
            let mut h = MoneyHistogram::new(run.records[0].snapshots[k].histogram.bin_width());
            for r in &run.records {
                h.merge(&r.snapshots[k].histogram)?;
            }
            let entropy = entropy_per_agent(&h).unwrap_or(f64::NAN);
            let temperature = h.sample_mean() - floor;
            w.serialize((
                run.records[0].snapshots[k].sweep,
                entropy,
                temperature,
                ks_to_exponential(&h, floor),
            ))?;
        }
        Ok(())
    })?;
    Ok(header("sweeps, nats per agent, money", &run.result.config_hash) + &body)
}

pub fn snapshots_csv(run: &ExperimentRun) -> Result<String> {
    let body = csv_body(|w| {
        w.write_record(["replicate", "sweep", "bin_left", "count"])?;
        for (i, r) in run.records.iter().enumerate() {
            for s in &r.snapshots {
                let h = &s.histogram;
                for (k, &c) in h.counts().iter().enumerate() {
                    if c > 0 {
                        w.serialize((i, s.sweep, h.bin_left(k), c))?;
                    }
                }
            }
        }
        Ok(())
    })?;
    Ok(header(
        "sweeps, money (bin_left), agents (count)",
        &run.result.config_hash,
    ) + &body)
}

/// Write everything an experiment asked for into `dir`; returns the paths.
pub fn write_experiment(dir: &Path, run: &ExperimentRun) -> Result<Vec<PathBuf>> {
    prepare_output_dir(dir)?;
    let hash = &run.result.config_hash;
    let mut written = vec![
        write_json(dir.join("results.json"), &run.result)?,
        write(
            dir.join("histogram.csv"),
            &histogram_csv(&run.pooled_histogram, hash)?,
        )?,
        write_json(dir.join("config.json"), &run.spec)?,
    ];
    if run.spec.wants(OutputKind::EntropySeries) || run.spec.wants(OutputKind::TemperatureSeries) {
        written.push(write(dir.join("series.csv"), &series_csv(run)?)?);
    }
    if run.spec.wants(OutputKind::Fits) || run.spec.wants(OutputKind::Tail) {
        written.push(write_json(dir.join("fits.json"), &run.result.pooled)?);
    }
    if run.spec.wants(OutputKind::Snapshots) {
        written.push(write(dir.join("snapshots.csv"), &snapshots_csv(run)?)?);
    }
    Ok(written)
}

/// Summary table plus one subdirectory per sweep point.
pub fn write_sweep(
    dir: &Path,
    result: &SweepResult,
    runs: &[ExperimentRun],
) -> Result<Vec<PathBuf>> {
    prepare_output_dir(dir)?;
    let mut written = vec![write_json(dir.join("sweep.json"), result)?];
    let body = csv_body(|w| {
        w.write_record([
            "point",
            "assignments",
            "temperature",
            "ks",
            "entropy",
            "passed",
        ])?;
        for p in &result.points {
            let fit = p.result.pooled.exponential.as_ref();
            w.serialize((
                p.index,
                serde_json::to_string(&p.assignments)?,
                fit.and_then(|f| f.temperature),
                fit.map(|f| f.ks),
                p.result.pooled.entropy,
                p.result.passed,
            ))?;
        }
        Ok(())
    })?;
    written.push(write(
        dir.join("sweep.csv"),
        &(header(
            "money (temperature), nats per agent (entropy)",
            &result.config_hash,
        ) + &body),
    )?);
    for (p, run) in result.points.iter().zip(runs) {
        written.extend(write_experiment(
            &dir.join(format!("point_{:03}", p.index)),
            run,
        )?);
    }
    Ok(written)
}

pub fn write_kinetic(
    dir: &Path,
    grid: &KineticGrid,
    report: &KineticReport,
    hash: &str,
) -> Result<Vec<PathBuf>> {
    prepare_output_dir(dir)?;
    Ok(vec![
        write(
            dir.join("stationary.csv"),
            &(header("money (m), probability per grid point (P)", hash) + &grid.to_csv()),
        )?,
        write_json(dir.join("kinetic.json"), report)?,
    ])
}

pub fn write_oracle(dir: &Path, report: &OracleReport, hash: &str) -> Result<Vec<PathBuf>> {
    prepare_output_dir(dir)?;
    let body = csv_body(|w| {
        w.write_record(["m", "enumerated", "formula", "monte_carlo"])?;
        for m in 0..report.enumerated.len() {
            w.serialize((
                m,
                report.enumerated[m],
                report.formula[m],
                report.monte_carlo[m],
            ))?;
        }
        Ok(())
    })?;
    Ok(vec![
        write(
            dir.join("oracle.csv"),
            &(header("money units (m), probability", hash) + &body),
        )?,
        write_json(dir.join("oracle.json"), report)?,
    ])
}

pub fn write_fit(dir: &Path, fit: &OfflineFit) -> Result<Vec<PathBuf>> {
    prepare_output_dir(dir)?;
    Ok(vec![write_json(dir.join("fits.json"), fit)?])
}
