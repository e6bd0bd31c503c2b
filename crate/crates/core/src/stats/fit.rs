//! Distribution fits: exponential (optionally shifted or bounded), Gamma,
//! power-law tails and two-sided exponentials for debt regimes.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};

use super::histogram::MoneyHistogram;
use super::ks::ks_sorted;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFamily {
    Exponential,
    Gamma,
    PowerLawTail,
}

/// Outcome of a fit. Which parameters are set depends on the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub family: FitFamily,
    /// Money temperature (exponential) or Gamma scale.
    pub temperature: Option<f64>,
    /// Gamma power-law prefactor exponent, `shape - 1`.
    pub beta: Option<f64>,
    /// Countercumulative tail exponent.
    pub alpha: Option<f64>,
    /// KS distance between the data and the fitted law.
    pub ks: f64,
    /// Lower edge of the support.
    pub support_shift: f64,
    pub samples: usize,
    pub method: String,
}

fn sorted(samples: &[f64]) -> Vec<f64> {
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    v
}

fn mean_var(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var)
}

/// Maximum-likelihood fit of `P(m) ~ exp(-(m - shift) / T)` on `m >= shift`.
///
/// `T` is the sample mean minus the shift. At least ten nonempty bins
/// (at width `T / 20`) above the shift are required.
pub fn fit_exponential(samples: &[f64], support_shift: f64) -> Result<FitResult> {
    if samples.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if let Some(bad) = samples.iter().find(|&&x| x < support_shift) {
        return Err(Error::Fit(format!(
            "sample {bad} lies below the support shift {support_shift}"
        )));
    }
    let (mean, var) = mean_var(samples);
    if var <= 0.0 {
        return Err(Error::Fit("degenerate data: zero variance".into()));
    }
    let t = mean - support_shift;
    if !(t > 0.0) {
        return Err(Error::Fit(format!("nonpositive temperature {t}")));
    }
    let shifted: Vec<f64> = samples.iter().map(|x| x - support_shift).collect();
    let bins = MoneyHistogram::from_samples(&shifted, t / 20.0).nonempty_bins();
    if bins < 10 {
        return Err(Error::Fit(format!(
            "only {bins} nonempty bins above the support shift, need 10"
        )));
    }
    let s = sorted(samples);
    let ks = ks_sorted(&s, |x| 1.0 - (-(x - support_shift) / t).exp());
    Ok(FitResult {
        family: FitFamily::Exponential,
        temperature: Some(t),
        beta: None,
        alpha: None,
        ks,
        support_shift,
        samples: samples.len(),
        method: "mle".into(),
    })
}

/// Method-of-moments fit of `P(m) ~ m^beta exp(-m / T)` on `m >= 0`.
pub fn fit_gamma(samples: &[f64]) -> Result<FitResult> {
    if samples.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    if let Some(bad) = samples.iter().find(|&&x| x < 0.0) {
        return Err(Error::Fit(format!(
            "gamma fit needs nonnegative data, found {bad}"
        )));
    }
    let (mean, var) = mean_var(samples);
    if var <= 0.0 || mean <= 0.0 {
        return Err(Error::Fit("degenerate data: zero variance".into()));
    }
    let shape = mean * mean / var;
    let scale = var / mean;
    let dist = Gamma::new(shape, 1.0 / scale).map_err(|e| Error::Fit(e.to_string()))?;
    let s = sorted(samples);
    let ks = ks_sorted(&s, |x| dist.cdf(x));
    Ok(FitResult {
        family: FitFamily::Gamma,
        temperature: Some(scale),
        beta: Some(shape - 1.0),
        alpha: None,
        ks,
        support_shift: 0.0,
        samples: samples.len(),
        method: "moments".into(),
    })
}

/// Tail index from the Hill estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HillEstimate {
    /// Countercumulative exponent: `P(X > x) ~ x^-alpha`.
    pub alpha: f64,
    /// Order statistics used.
    pub k: usize,
    /// Smallest value treated as tail.
    pub threshold: f64,
    /// Set when `alpha > 5`, i.e. the data show no power tail.
    pub no_power_tail: bool,
}

impl HillEstimate {
    /// Exponent of the density, `alpha + 1`.
    pub fn density_exponent(&self) -> f64 {
        self.alpha + 1.0
    }

    pub fn to_fit(&self, samples: usize) -> FitResult {
        FitResult {
            family: FitFamily::PowerLawTail,
            temperature: None,
            beta: None,
            alpha: Some(self.alpha),
            ks: f64::NAN,
            support_shift: self.threshold,
            samples,
            method: "hill".into(),
        }
    }
}

/// Default share of the largest observations used by [`tail_exponent_hill`].
pub const DEFAULT_TAIL_FRACTION: f64 = 0.05;

/// Hill estimator over the top `tail_fraction` order statistics:
/// `alpha = k / sum_{i<k} ln(x_(i) / x_(k))` with `x_(0)` the largest value.
pub fn tail_exponent_hill(samples: &[f64], tail_fraction: f64) -> Result<HillEstimate> {
    if !(tail_fraction > 0.0 && tail_fraction <= 0.2) {
        return Err(Error::Estimation(format!(
            "tail fraction must lie in (0, 0.2], got {tail_fraction}"
        )));
    }
    let k = (samples.len() as f64 * tail_fraction).floor() as usize;
    if k < 100 || k >= samples.len() {
        return Err(Error::Estimation(format!(
            "{k} tail samples available, need at least 100"
        )));
    }
    let mut desc = samples.to_vec();
    desc.sort_by(|a, b| b.total_cmp(a));
    let threshold = desc[k];
    if threshold <= 0.0 {
        return Err(Error::Estimation(format!(
            "tail threshold {threshold} is not positive"
        )));
    }
    let sum_log: f64 = desc[..k].iter().map(|&x| (x / threshold).ln()).sum();
    if sum_log <= 0.0 {
        return Err(Error::Estimation("tail has no spread".into()));
    }
    let alpha = k as f64 / sum_log;
    Ok(HillEstimate {
        alpha,
        k,
        threshold,
        no_power_tail: alpha > 5.0,
    })
}

/// Exponential fits of the positive and negative parts of a balance
/// distribution, as produced by debt regimes with a global loan cap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoSidedFit {
    /// Positive money per agent, `sum(m > 0) / N`.
    pub positive_temperature: f64,
    /// Negative money per agent, `sum(|m| for m < 0) / N`.
    pub negative_temperature: f64,
    /// MLE decay length of the positive tail (mean of the positive balances).
    pub positive_slope: f64,
    /// MLE decay length of the negative tail (mean magnitude of the negative
    /// balances).
    pub negative_slope: f64,
    pub fraction_positive: f64,
    pub fraction_negative: f64,
    pub ks_positive: f64,
    pub ks_negative: f64,
}

pub fn fit_two_sided(samples: &[f64]) -> Result<TwoSidedFit> {
    let n = samples.len() as f64;
    let pos: Vec<f64> = samples.iter().copied().filter(|&x| x > 0.0).collect();
    let neg: Vec<f64> = samples.iter().filter(|&&x| x < 0.0).map(|x| -x).collect();
    if pos.len() < 2 || neg.len() < 2 {
        return Err(Error::Fit(format!(
            "two-sided fit needs both signs ({} positive, {} negative)",
            pos.len(),
            neg.len()
        )));
    }
    let side = |xs: &[f64]| {
        let sum: f64 = xs.iter().sum();
        let slope = sum / xs.len() as f64;
        let s = sorted(xs);
        let ks = ks_sorted(&s, |x| 1.0 - (-x / slope).exp());
        (sum / n, slope, ks)
    };
    let (pt, ps, pk) = side(&pos);
    let (nt, ns, nk) = side(&neg);
    Ok(TwoSidedFit {
        positive_temperature: pt,
        negative_temperature: nt,
        positive_slope: ps,
        negative_slope: ns,
        fraction_positive: pos.len() as f64 / n,
        fraction_negative: neg.len() as f64 / n,
        ks_positive: pk,
        ks_negative: nk,
    })
}

/// Slope lengths a two-sided exponential must have when the total positive
/// and total negative money per agent are fixed and the density is
/// continuous at zero: `(T+', T-')` with `T+' / T-' = sqrt(M+ / M-)`.
pub fn two_sided_max_entropy_slopes(
    positive_per_agent: f64,
    negative_per_agent: f64,
) -> (f64, f64) {
    let ratio = (positive_per_agent / negative_per_agent).sqrt();
    let neg = negative_per_agent * (1.0 + ratio);
    (ratio * neg, neg)
}

/// Exponential law restricted to a bounded interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedExponentialFit {
    /// `P(m) ~ exp(-rate * m)`; a negative rate means `dP/dm > 0`.
    pub rate: f64,
    pub lower: f64,
    pub upper: f64,
    pub ks: f64,
}

impl BoundedExponentialFit {
    /// `1 / rate`; negative for an inverted population.
    pub fn temperature(&self) -> f64 {
        1.0 / self.rate
    }
}

/// Mean position, as a fraction of the interval, of a truncated
/// exponential with dimensionless rate `t = rate * width`.
fn truncated_mean_fraction(t: f64) -> f64 {
    if t.abs() < 1e-6 {
        0.5 - t / 12.0
    } else {
        1.0 / t - 1.0 / t.exp_m1()
    }
}

/// Maximum-likelihood rate of an exponential truncated to `[lower, upper]`.
pub fn fit_bounded_exponential(
    samples: &[f64],
    lower: f64,
    upper: f64,
) -> Result<BoundedExponentialFit> {
    if !(upper > lower) {
        return Err(Error::Fit(format!("empty interval [{lower}, {upper}]")));
    }
    if samples.len() < 2 {
        return Err(Error::Fit("need at least 2 samples".into()));
    }
    if let Some(bad) = samples.iter().find(|&&x| x < lower || x > upper) {
        return Err(Error::Fit(format!(
            "sample {bad} outside [{lower}, {upper}]"
        )));
    }
    let (mean, var) = mean_var(samples);
    if var <= 0.0 {
        return Err(Error::Fit("degenerate data: zero variance".into()));
    }
    let width = upper - lower;
    let target = (mean - lower) / width;
    // The mean fraction decreases monotonically from 1 to 0 as t goes from
    // -inf to +inf; bisect on t.
    let (mut lo, mut hi) = (-1e4, 1e4);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if truncated_mean_fraction(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    let rate = t / width;
    let s = sorted(samples);
    let cdf = |x: f64| {
        let u = ((x - lower) / width).clamp(0.0, 1.0);
        if t.abs() < 1e-12 {
            u
        } else {
            (-t * u).exp_m1() / (-t).exp_m1()
        }
    };
    let ks = ks_sorted(&s, cdf);
    Ok(BoundedExponentialFit {
        rate,
        lower,
        upper,
        ks,
    })
}

/// Least-squares slope of `ln P_k` against bin center over the nonempty bins
/// whose centers fall in `[from, to]`.
pub fn log_linear_slope(hist: &MoneyHistogram, from: f64, to: f64) -> Result<f64> {
    let pts: Vec<(f64, f64)> = hist
        .probabilities()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(k, &p)| (hist.bin_center(k), p.ln()))
        .filter(|(x, _)| *x >= from && *x <= to)
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit(format!(
            "only {} nonempty bins in range",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Ok(sxy / sxx)
}
