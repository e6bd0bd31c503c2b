//! Window-averaged series and the stationarity verdict.

use serde::{Deserialize, Serialize};

use super::entropy::entropy_per_agent;
use super::histogram::MoneyHistogram;
use super::ks::ks_histograms;
use crate::engine::Snapshot;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationarityParams {
    /// Window length in sweeps.
    pub window: u64,
    /// KS threshold between window-averaged histograms.
    pub epsilon: f64,
    /// Number of successive stable comparisons required; the verdict needs
    /// `consecutive + 1` windows that are pairwise within `epsilon`.
    pub consecutive: usize,
}

impl Default for StationarityParams {
    fn default() -> Self {
        StationarityParams {
            window: 1000,
            epsilon: 0.01,
            consecutive: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationarityVerdict {
    pub stationary: bool,
    /// First sweep of the earliest run of mutually close windows.
    pub stationary_from_sweep: Option<u64>,
    /// Last sweep of that run, i.e. when the detector fired.
    pub detected_at_sweep: Option<u64>,
    pub windows: usize,
    /// KS distance between each window and the next.
    pub adjacent_distances: Vec<f64>,
}

/// Window-averaged histogram for each full window `((j) W, (j + 1) W]`.
///
/// The initial snapshot at sweep 0 is not part of any window.
pub fn window_histograms(
    snapshots: &[Snapshot],
    window: u64,
) -> Result<Vec<(u64, MoneyHistogram)>> {
    if window == 0 {
        return Err(Error::Usage("window length must be positive".into()));
    }
    let Some(last) = snapshots.iter().map(|s| s.sweep).max() else {
        return Ok(Vec::new());
    };
    let full = (last / window) as usize;
    let width = snapshots[0].histogram.bin_width();
    let mut out: Vec<(u64, MoneyHistogram)> = (0..full)
        .map(|j| (j as u64 * window, MoneyHistogram::new(width)))
        .collect();
    for s in snapshots.iter().filter(|s| s.sweep > 0) {
        let j = ((s.sweep - 1) / window) as usize;
        if j < full {
            out[j].1.merge(&s.histogram)?;
        }
    }
    Ok(out.into_iter().filter(|(_, h)| !h.is_empty()).collect())
}

/// Declare the run stationary at the first point where `consecutive + 1`
/// successive window-averaged histograms are pairwise within `epsilon`
/// in KS distance.
pub fn stationarity_detector(
    snapshots: &[Snapshot],
    params: &StationarityParams,
) -> Result<StationarityVerdict> {
    let k = params.consecutive.max(1);
    let windows = window_histograms(snapshots, params.window)?;
    if windows.len() < k + 1 {
        return Err(Error::Usage(format!(
            "stationarity detection needs at least {} windows of {} sweeps, have {}",
            k + 1,
            params.window,
            windows.len()
        )));
    }
    let adjacent_distances: Vec<f64> = windows
        .windows(2)
        .map(|w| ks_histograms(&w[0].1, &w[1].1))
        .collect();
    for end in k..windows.len() {
        let run = &windows[end - k..=end];
        let stable = run.iter().enumerate().all(|(a, (_, ha))| {
            run[a + 1..]
                .iter()
                .all(|(_, hb)| ks_histograms(ha, hb) < params.epsilon)
        });
        if stable {
            return Ok(StationarityVerdict {
                stationary: true,
                stationary_from_sweep: Some(run[0].0),
                detected_at_sweep: Some(windows[end].0 + params.window),
                windows: windows.len(),
                adjacent_distances,
            });
        }
    }
    Ok(StationarityVerdict {
        stationary: false,
        stationary_from_sweep: None,
        detected_at_sweep: None,
        windows: windows.len(),
        adjacent_distances,
    })
}

/// One point of a window-averaged series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPoint {
    /// End of the window (0 for the initial state).
    pub sweep: u64,
    pub entropy: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Entropy, mean and variance of the window-averaged histograms, preceded
/// by the initial snapshot if one was taken at sweep 0.
pub fn window_series(snapshots: &[Snapshot], window: u64) -> Result<Vec<WindowPoint>> {
    let mut out = Vec::new();
    if let Some(s0) = snapshots.iter().find(|s| s.sweep == 0) {
        out.push(WindowPoint {
            sweep: 0,
            entropy: entropy_per_agent(&s0.histogram)?,
            mean: s0.histogram.sample_mean(),
            variance: s0.histogram.sample_variance(),
        });
    }
    for (start, h) in window_histograms(snapshots, window)? {
        out.push(WindowPoint {
            sweep: start + window,
            entropy: entropy_per_agent(&h)?,
            mean: h.sample_mean(),
            variance: h.sample_variance(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snap(sweep: u64, xs: &[f64]) -> Snapshot {
        Snapshot::new(sweep, xs.to_vec(), 1.0)
    }

    #[test]
    fn frozen_state_is_stationary_from_the_first_window() {
        let xs = [0.0, 3.0, 7.0, 7.5];
        let snaps: Vec<Snapshot> = (0..=40).map(|s| snap(s, &xs)).collect();
        let params = StationarityParams {
            window: 10,
            epsilon: 0.01,
            consecutive: 3,
        };
        let v = stationarity_detector(&snaps, &params).unwrap();
        assert!(v.stationary);
        assert_eq!(v.stationary_from_sweep, Some(0));
        assert_eq!(v.detected_at_sweep, Some(40));
    }

    #[test]
    fn drifting_state_is_not_stationary() {
        let snaps: Vec<Snapshot> = (0..=40).map(|s| snap(s, &[s as f64 * 10.0, 1.0])).collect();
        let params = StationarityParams {
            window: 10,
            epsilon: 0.01,
            consecutive: 2,
        };
        let v = stationarity_detector(&snaps, &params).unwrap();
        assert!(!v.stationary);
        assert_eq!(v.adjacent_distances.len(), 3);
    }

    #[test]
    fn too_few_windows_is_a_usage_error() {
        let snaps: Vec<Snapshot> = (0..=15).map(|s| snap(s, &[1.0, 2.0])).collect();
        let params = StationarityParams {
            window: 10,
            epsilon: 0.01,
            consecutive: 3,
        };
        assert!(matches!(
            stationarity_detector(&snaps, &params),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn series_starts_at_the_initial_state() {
        let mut snaps = vec![snap(0, &[5.0, 5.0])];
        snaps.extend((1..=20).map(|s| snap(s, &[0.0, 10.0])));
        let series = window_series(&snaps, 10).unwrap();
        assert_eq!(series.len(), 3);
        assert_eq!(series[0].entropy, 0.0);
        assert!((series[1].entropy - 2f64.ln()).abs() < 1e-12);
        assert_eq!(series[2].sweep, 20);
    }
}
