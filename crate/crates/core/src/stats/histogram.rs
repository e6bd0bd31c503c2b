use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fixed-width histogram of money balances with streaming moments.
///
/// Bin `k` covers `[k * bin_width, (k + 1) * bin_width)` on a global grid
/// anchored at zero, so histograms of the same width can always be merged.
/// `counts[0]` is the bin with global index `origin_index`; the vector
/// grows in either direction as samples arrive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoneyHistogram {
    bin_width: f64,
    origin_index: i64,
    counts: Vec<u64>,
    total: u64,
    mean: f64,
    m2: f64,
}

impl MoneyHistogram {
    pub fn new(bin_width: f64) -> Self {
        assert!(
            bin_width > 0.0 && bin_width.is_finite(),
            "bin width must be positive"
        );
        MoneyHistogram {
            bin_width,
            origin_index: 0,
            counts: Vec::new(),
            total: 0,
            mean: 0.0,
            m2: 0.0,
        }
    }

    pub fn from_samples(samples: &[f64], bin_width: f64) -> Self {
        let mut h = Self::new(bin_width);
        for &x in samples {
            h.push(x);
        }
        h
    }

    /// Build from explicit bin counts starting at `origin` (which must lie on
    /// the grid). Moments are computed from bin centers.
    pub fn from_counts(bin_width: f64, origin: f64, counts: Vec<u64>) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(Error::Usage(format!(
                "bin width must be positive, got {bin_width}"
            )));
        }
        let origin_index = (origin / bin_width).round();
        if ((origin_index * bin_width) - origin).abs() > 1e-9 * bin_width.max(origin.abs()) {
            return Err(Error::Usage(format!(
                "bin origin {origin} is not a multiple of the bin width {bin_width}"
            )));
        }
        let mut h = Self::new(bin_width);
        h.origin_index = origin_index as i64;
        let total: u64 = counts.iter().sum();
        h.total = total;
        if total > 0 {
            let mut s = 0.0;
            for (k, &c) in counts.iter().enumerate() {
                s += c as f64 * h.center_of(h.origin_index + k as i64);
            }
            h.mean = s / total as f64;
            let mut m2 = 0.0;
            for (k, &c) in counts.iter().enumerate() {
                let d = h.center_of(h.origin_index + k as i64) - h.mean;
                m2 += c as f64 * d * d;
            }
            h.m2 = m2;
        }
        h.counts = counts;
        h.trim();
        Ok(h)
    }

    fn center_of(&self, index: i64) -> f64 {
        (index as f64 + 0.5) * self.bin_width
    }

    fn trim(&mut self) {
        let lead = self.counts.iter().take_while(|&&c| c == 0).count();
        if lead == self.counts.len() {
            self.counts.clear();
            self.origin_index = 0;
            return;
        }
        self.counts.drain(..lead);
        self.origin_index += lead as i64;
        while self.counts.last() == Some(&0) {
            self.counts.pop();
        }
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        let idx = (x / self.bin_width).floor() as i64;
        self.add_to_bin(idx, 1);
        self.total += 1;
        let delta = x - self.mean;
        self.mean += delta / self.total as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn add_to_bin(&mut self, idx: i64, count: u64) {
        if self.counts.is_empty() {
            self.origin_index = idx;
            self.counts.push(count);
            return;
        }
        if idx < self.origin_index {
            let extra = (self.origin_index - idx) as usize;
            self.counts.splice(0..0, std::iter::repeat_n(0, extra));
            self.origin_index = idx;
        }
        let k = (idx - self.origin_index) as usize;
        if k >= self.counts.len() {
            self.counts.resize(k + 1, 0);
        }
        self.counts[k] += count;
    }

    /// Pool another histogram of the same bin width into this one.
    pub fn merge(&mut self, other: &MoneyHistogram) -> Result<()> {
        if (self.bin_width - other.bin_width).abs() > 1e-12 * self.bin_width {
            return Err(Error::Usage(format!(
                "cannot merge histograms with bin widths {} and {}",
                self.bin_width, other.bin_width
            )));
        }
        if other.total == 0 {
            return Ok(());
        }
        for (k, &c) in other.counts.iter().enumerate() {
            if c > 0 {
                self.add_to_bin(other.origin_index + k as i64, c);
            }
        }
        let n1 = self.total as f64;
        let n2 = other.total as f64;
        let n = n1 + n2;
        let delta = other.mean - self.mean;
        self.mean += delta * n2 / n;
        self.m2 += other.m2 + delta * delta * n1 * n2 / n;
        self.total += other.total;
        Ok(())
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width
    }

    /// Left edge of the first stored bin.
    pub fn origin(&self) -> f64 {
        self.origin_index as f64 * self.bin_width
    }

    pub fn origin_index(&self) -> i64 {
        self.origin_index
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn num_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn nonempty_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn bin_left(&self, k: usize) -> f64 {
        (self.origin_index + k as i64) as f64 * self.bin_width
    }

    pub fn bin_center(&self, k: usize) -> f64 {
        self.center_of(self.origin_index + k as i64)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let t = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / t).collect()
    }

    /// Probability of the bin containing `x`.
    pub fn probability_at(&self, x: f64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let idx = (x / self.bin_width).floor() as i64 - self.origin_index;
        if idx < 0 || idx as usize >= self.counts.len() {
            0.0
        } else {
            self.counts[idx as usize] as f64 / self.total as f64
        }
    }

    /// Mean of the raw samples pushed into the histogram.
    pub fn sample_mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance of the raw samples.
    pub fn sample_variance(&self) -> f64 {
        if self.total < 2 {
            0.0
        } else {
            self.m2 / (self.total - 1) as f64
        }
    }

    /// Mean computed from bin centers.
    pub fn center_mean(&self) -> f64 {
        let t = self.total as f64;
        self.counts
            .iter()
            .enumerate()
            .map(|(k, &c)| c as f64 * self.bin_center(k))
            .sum::<f64>()
            / t
    }

    /// Empirical CDF at the right edge of every stored bin.
    pub fn cdf_at_right_edges(&self) -> Vec<f64> {
        let t = self.total as f64;
        let mut acc = 0u64;
        self.counts
            .iter()
            .map(|&c| {
                acc += c;
                acc as f64 / t
            })
            .collect()
    }

    /// Expand into one bin-center sample per count.
    pub fn center_samples(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.total as usize);
        for (k, &c) in self.counts.iter().enumerate() {
            let x = self.bin_center(k);
            out.extend(std::iter::repeat_n(x, c as usize));
        }
        out
    }
}
