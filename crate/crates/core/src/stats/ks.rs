//! Kolmogorov-Smirnov distances.

use super::histogram::MoneyHistogram;

/// Sup distance between the empirical CDF of `samples` and `cdf`.
///
/// Both one-sided gaps are checked at every order statistic, so the
/// reference may be discontinuous only where the samples are.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    if samples.is_empty() {
        return 1.0;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    ks_sorted(&sorted, cdf)
}

/// [`ks_distance`] for samples that are already sorted ascending.
pub fn ks_sorted(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j < sorted.len() && sorted[j] == x {
            j += 1;
        }
        let f = cdf(x).clamp(0.0, 1.0);
        // Left limit of the reference is approximated by its value at x,
        // which is exact for continuous references.
        d = d
            .max((f - i as f64 / n).abs())
            .max((j as f64 / n - f).abs());
        i = j;
    }
    d.min(1.0)
}

/// Two-sample KS distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            1.0
        };
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// KS distance between two histograms on the same grid, evaluated at bin
/// edges.
pub fn ks_histograms(a: &MoneyHistogram, b: &MoneyHistogram) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() {
            0.0
        } else {
            1.0
        };
    }
    let lo = a.origin_index().min(b.origin_index());
    let hi = (a.origin_index() + a.num_bins() as i64).max(b.origin_index() + b.num_bins() as i64);
    let (ta, tb) = (a.total() as f64, b.total() as f64);
    let count = |h: &MoneyHistogram, idx: i64| -> u64 {
        let k = idx - h.origin_index();
        if k < 0 || k as usize >= h.num_bins() {
            0
        } else {
            h.counts()[k as usize]
        }
    };
    let (mut ca, mut cb) = (0u64, 0u64);
    let mut d: f64 = 0.0;
    for idx in lo..hi {
        ca += count(a, idx);
        cb += count(b, idx);
        d = d.max((ca as f64 / ta - cb as f64 / tb).abs());
    }
    d
}

/// KS distance between two probability vectors on the same support.
pub fn ks_discrete(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let (mut fp, mut fq) = (0.0, 0.0);
    let mut d: f64 = 0.0;
    for k in 0..n {
        fp += p.get(k).copied().unwrap_or(0.0);
        fq += q.get(k).copied().unwrap_or(0.0);
        d = d.max((fp - fq).abs());
    }
    d
}
