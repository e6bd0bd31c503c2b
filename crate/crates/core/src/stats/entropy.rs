//! Entropy, multiplicity and expectation values of money histograms.

use statrs::function::gamma::ln_gamma;

use super::histogram::MoneyHistogram;
use crate::error::{Error, Result};

/// `-sum_k P_k ln P_k` over nonempty bins.
///
/// The value depends on the bin width, so it should always be reported
/// together with it.
pub fn entropy_per_agent(hist: &MoneyHistogram) -> Result<f64> {
    if hist.is_empty() {
        return Err(Error::Usage("entropy of an empty histogram".into()));
    }
    let t = hist.total() as f64;
    let s: f64 = hist
        .counts()
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / t;
            -p * p.ln()
        })
        .sum();
    // A single occupied bin sums to -0.0.
    Ok(s + 0.0)
}

/// `ln(N! / prod_k N_k!)` computed with log-gamma.
pub fn log_multiplicity(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let ln_fact = |k: u64| ln_gamma(k as f64 + 1.0);
    ln_fact(n) - counts.iter().map(|&c| ln_fact(c)).sum::<f64>()
}

/// Mean money per agent.
pub fn money_temperature(balances: &[f64]) -> f64 {
    balances.iter().sum::<f64>() / balances.len() as f64
}

/// `sum_k x(m_k) P_k` with `m_k` the bin centers.
pub fn expectation(hist: &MoneyHistogram, observable: impl Fn(f64) -> f64) -> Result<f64> {
    if hist.is_empty() {
        return Err(Error::Usage("expectation over an empty histogram".into()));
    }
    let t = hist.total() as f64;
    Ok(hist
        .counts()
        .iter()
        .enumerate()
        .map(|(k, &c)| observable(hist.bin_center(k)) * c as f64 / t)
        .sum())
}

/// Entropy of the geometric distribution `P_k = (1 - q) q^k` on bins
/// `k = 0, 1, 2, ...` with mean bin index `mean_index`.
///
/// Among all distributions on the nonnegative integers with a given mean,
/// this one has the largest entropy.
pub fn discrete_exponential_entropy(mean_index: f64) -> f64 {
    if mean_index <= 0.0 {
        return 0.0;
    }
    let mu = mean_index;
    (1.0 + mu) * (1.0 + mu).ln() - mu * mu.ln()
}

/// Entropy of the maximum-entropy histogram on the same grid, floor and
/// mean (computed from bin centers) as `hist`.
///
/// `floor` is the left edge of the lowest admissible bin.
pub fn max_entropy_reference(hist: &MoneyHistogram, floor: f64) -> f64 {
    let w = hist.bin_width();
    let mean_index = (hist.center_mean() - floor) / w - 0.5;
    discrete_exponential_entropy(mean_index)
}

/// Entropy of an exponential density with temperature `t` binned at width `w`.
pub fn binned_exponential_entropy(t: f64, w: f64) -> f64 {
    let q = (-w / t).exp();
    discrete_exponential_entropy(q / (1.0 - q))
}
