//! Mean-field master equation for the money distribution on a uniform grid.
//!
//! Grid point `k` holds money `floor + k * step`. A kernel gives, for a
//! payer at point `x`, the probability `w(x, d)` of proposing a transfer of
//! `d` grid steps. The transfer to a receiver at `y` happens only if the
//! payer stays on the grid (`x >= d`) and the receiver does too
//! (`y + d < G`). Time is measured in sweeps: every agent is proposed as a
//! payer once and as a receiver once per unit time, which matches the
//! Monte Carlo engine.
//!
//! The evolution is
//!
//! ```text
//! dP(a)/dt = sum_{x,y,d} w(x,d) P(x) P(y) [ -1{a=x} - 1{a=y} + 1{a=x-d} + 1{a=y+d} ]
//! ```
//!
//! integrated with forward Euler.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transfer-amount law on the grid, in grid steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Kernel {
    /// Nothing ever moves.
    Zero,
    /// Always `steps` grid steps.
    FixedStep { steps: usize },
    /// `d` uniform on `0..max_steps`.
    UniformSteps { max_steps: usize },
    /// `d = round(gamma * x)`: a fixed fraction of the payer's money
    /// (grid measured from the floor).
    Proportional { gamma: f64 },
}

impl Kernel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Zero => Ok(()),
            Kernel::FixedStep { steps } if steps > 0 => Ok(()),
            Kernel::UniformSteps { max_steps } if max_steps > 0 => Ok(()),
            Kernel::Proportional { gamma } if gamma > 0.0 && gamma < 1.0 => Ok(()),
            ref k => Err(Error::Config(format!("invalid kernel {k:?}"))),
        }
    }

    /// Proposals `(d, w)` with `d > 0` for a payer at grid point `x`.
    /// Proposals with `d = 0` are no-ops and are left out.
    fn proposals(&self, x: usize, out: &mut Vec<(usize, f64)>) {
        out.clear();
        match *self {
            Kernel::Zero => {}
            Kernel::FixedStep { steps } => out.push((steps, 1.0)),
            Kernel::UniformSteps { max_steps } => {
                let w = 1.0 / max_steps as f64;
                out.extend((1..max_steps).map(|d| (d, w)));
            }
            Kernel::Proportional { gamma } => {
                let d = (gamma * x as f64).round() as usize;
                if d > 0 {
                    out.push((d, 1.0));
                }
            }
        }
    }

    /// Rate of moving `d` steps from a payer at `x` to a receiver at `y`
    /// on a grid of `points` points.
    pub fn rate(&self, x: usize, y: usize, d: usize, points: usize) -> f64 {
        if d == 0 || d > x || y + d >= points {
            return 0.0;
        }
        match *self {
            Kernel::Zero => 0.0,
            Kernel::FixedStep { steps } => f64::from(u8::from(d == steps)),
            Kernel::UniformSteps { max_steps } => {
                if d < max_steps {
                    1.0 / max_steps as f64
                } else {
                    0.0
                }
            }
            Kernel::Proportional { gamma } => {
                f64::from(u8::from((gamma * x as f64).round() as usize == d))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KineticGrid {
    pub floor: f64,
    pub step: f64,
    pub probs: Vec<f64>,
    pub kernel: Kernel,
}

impl KineticGrid {
    pub fn new(floor: f64, step: f64, probs: Vec<f64>, kernel: Kernel) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Config(format!(
                "grid step must be positive, got {step}"
            )));
        }
        if probs.len() < 2 {
            return Err(Error::Config("grid needs at least 2 points".into()));
        }
        if probs.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::Config("probabilities must be nonnegative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        kernel.validate()?;
        Ok(KineticGrid {
            floor,
            step,
            probs,
            kernel,
        })
    }

    /// All probability at the grid point nearest to `money`.
    pub fn delta(floor: f64, step: f64, points: usize, money: f64, kernel: Kernel) -> Result<Self> {
        let k = ((money - floor) / step).round();
        if k < 0.0 || k as usize >= points {
            return Err(Error::Config(format!(
                "initial money {money} is off the grid"
            )));
        }
        let mut probs = vec![0.0; points];
        probs[k as usize] = 1.0;
        Self::new(floor, step, probs, kernel)
    }

    pub fn points(&self) -> usize {
        self.probs.len()
    }

    pub fn money_at(&self, k: usize) -> f64 {
        self.floor + k as f64 * self.step
    }

    pub fn total_probability(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| self.money_at(k) * p)
            .sum()
    }

    /// Mean position in grid steps above the floor.
    pub fn mean_index(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }

    /// `dP/dt` and the largest total outflow rate of any grid point.
    fn derivative(&self) -> (Vec<f64>, f64) {
        let g = self.points();
        let p = &self.probs;
        let mut dp = vec![0.0; g];
        // prefix[i] = sum_{y < i} P(y)
        let mut prefix = vec![0.0; g + 1];
        for i in 0..g {
            prefix[i + 1] = prefix[i] + p[i];
        }
        // Payer-weighted proposal mass per step size.
        let mut by_step = vec![0.0; g];
        let mut payer_out = vec![0.0; g];
        let mut props = Vec::new();
        for x in 0..g {
            self.kernel.proposals(x, &mut props);
            for &(d, w) in &props {
                if d > x || d >= g {
                    continue;
                }
                let receivers = prefix[g - d];
                payer_out[x] += w * receivers;
                if p[x] == 0.0 {
                    continue;
                }
                let flux = w * p[x] * receivers;
                dp[x] -= flux;
                dp[x - d] += flux;
                by_step[d] += w * p[x];
            }
        }
        let mut receiver_out = vec![0.0; g];
        for (d, &a) in by_step.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for y in 0..g - d {
                receiver_out[y] += a;
                let flux = a * p[y];
                dp[y] -= flux;
                dp[y + d] += flux;
            }
        }
        let max_out = payer_out
            .iter()
            .zip(&receiver_out)
            .map(|(a, b)| a + b)
            .fold(0.0, f64::max);
        (dp, max_out)
    }

    /// One forward-Euler step of length `dt`. Returns the sup norm of the
    /// change.
    pub fn step_master_equation(&mut self, dt: f64) -> Result<f64> {
        let (dp, max_out) = self.derivative();
        if max_out * dt >= 1.0 {
            return Err(Error::Step(format!(
                "time step {dt} too large for outflow rate {max_out}"
            )));
        }
        let mut change: f64 = 0.0;
        for (p, d) in self.probs.iter_mut().zip(&dp) {
            let next = *p + dt * d;
            change = change.max((next - *p).abs());
            *p = next.max(0.0);
        }
        let total = self.total_probability();
        let drift = (total - 1.0).abs();
        if drift > 1e-12 {
            return Err(Error::Step(format!("probability drifted by {drift}")));
        }
        if drift > 0.0 {
            for p in &mut self.probs {
                *p /= total;
            }
        }
        Ok(change)
    }

    /// Probability mass in the upper sixth of the grid.
    pub fn upper_mass(&self) -> f64 {
        let g = self.points();
        self.probs[g - g / 6..].iter().sum()
    }

    /// Double the number of grid points, keeping the step.
    pub fn extend(&mut self) {
        let g = self.points();
        self.probs.resize(2 * g, 0.0);
    }

    /// `(m, P)` rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("m,P\n");
        for (k, p) in self.probs.iter().enumerate() {
            let _ = writeln!(s, "{},{:e}", self.money_at(k), p);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetailedBalanceReport {
    /// Largest `|forward - reverse| / max(forward, reverse)` over all
    /// transitions with positive occupation on both sides.
    pub max_residual: f64,
    /// Transitions skipped because a state involved has zero probability.
    pub excluded: usize,
    pub checked: usize,
}

/// How far each elementary transition is from cancelling its reverse.
pub fn detailed_balance_residual(grid: &KineticGrid) -> DetailedBalanceReport {
    let g = grid.points();
    let p = &grid.probs;
    let mut report = DetailedBalanceReport {
        max_residual: 0.0,
        excluded: 0,
        checked: 0,
    };
    let mut props = Vec::new();
    for x in 0..g {
        grid.kernel.proposals(x, &mut props);
        for &(d, _) in &props {
            if d > x {
                continue;
            }
            for y in 0..g.saturating_sub(d) {
                let fwd_rate = grid.kernel.rate(x, y, d, g);
                if fwd_rate == 0.0 {
                    continue;
                }
                let (a, b) = (x - d, y + d);
                if p[x] == 0.0 || p[y] == 0.0 || p[a] == 0.0 || p[b] == 0.0 {
                    report.excluded += 1;
                    continue;
                }
                let rev_rate = grid.kernel.rate(b, a, d, g);
                let fwd = fwd_rate * p[x] * p[y];
                let rev = rev_rate * p[a] * p[b];
                let r = (fwd - rev).abs() / fwd.max(rev);
                report.max_residual = report.max_residual.max(r);
                report.checked += 1;
            }
        }
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum KernelSymmetry {
    Symmetric,
    /// Moving `d` steps from `x` to `y` has rate `forward`, but moving it
    /// back from `y + d` to `x - d` has rate `reverse`.
    Asymmetric {
        x: usize,
        y: usize,
        d: usize,
        forward: f64,
        reverse: f64,
    },
}

/// Check `f[x, y -> x-d, y+d] == f[y+d, x-d -> y, x]` on every admissible
/// entry of a grid with `points` points.
pub fn kernel_symmetry_check(kernel: &Kernel, points: usize) -> KernelSymmetry {
    let mut props = Vec::new();
    for x in 0..points {
        kernel.proposals(x, &mut props);
        for &(d, _) in &props {
            if d > x {
                continue;
            }
            for y in 0..points.saturating_sub(d) {
                let forward = kernel.rate(x, y, d, points);
                let reverse = kernel.rate(y + d, x - d, d, points);
                if (forward - reverse).abs() > 1e-12 {
                    return KernelSymmetry::Asymmetric {
                        x,
                        y,
                        d,
                        forward,
                        reverse,
                    };
                }
            }
        }
    }
    KernelSymmetry::Symmetric
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    /// Stop when `max |dP| / dt` falls below this.
    pub tolerance: f64,
    pub max_steps: usize,
    /// Initial time step; halved whenever the stability guard trips.
    pub dt: f64,
    /// Grow the grid while more than this much mass sits in its upper sixth.
    pub max_upper_mass: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e-10,
            max_steps: 1_000_000,
            dt: 0.4,
            max_upper_mass: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub steps: usize,
    pub time: f64,
    pub dt: f64,
    /// `max |dP| / dt` of the last step.
    pub residual: f64,
    pub points: usize,
    pub upper_mass: f64,
}

/// Integrate until `dP/dt` vanishes (to `tolerance`) or `max_steps` is hit.
pub fn stationary_solve(grid: &mut KineticGrid, options: &SolveOptions) -> Result<SolveReport> {
    let mut dt = options.dt;
    let mut steps = 0;
    let mut time = 0.0;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    while steps < options.max_steps {
        match grid.step_master_equation(dt) {
            Ok(change) => {
                steps += 1;
                time += dt;
                residual = change / dt;
                if residual < options.tolerance {
                    if grid.upper_mass() > options.max_upper_mass {
                        grid.extend();
                        continue;
                    }
                    converged = true;
                    break;
                }
            }
            Err(Error::Step(_)) if dt > 1e-9 => dt *= 0.5,
            Err(e) => return Err(e),
        }
    }
    Ok(SolveReport {
        converged,
        steps,
        time,
        dt,
        residual,
        points: grid.points(),
        upper_mass: grid.upper_mass(),
    })
}

/// Truncated geometric distribution `P_k ~ q^k` on `0..points` with the
/// given mean index, i.e. the discrete exponential a symmetric kernel
/// relaxes to. Found by bisection on `ln q`.
pub fn discrete_exponential(points: usize, mean_index: f64) -> Vec<f64> {
    let weights = |lnq: f64| -> Vec<f64> {
        let raw: Vec<f64> = (0..points).map(|k| lnq * k as f64).collect();
        let top = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = raw.iter().map(|r| (r - top).exp()).collect();
        let s: f64 = w.iter().sum();
        w.into_iter().map(|x| x / s).collect()
    };
    let mean = |p: &[f64]| p.iter().enumerate().map(|(k, v)| k as f64 * v).sum::<f64>();
    let (mut lo, mut hi) = (-50.0, 50.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean(&weights(mid)) < mean_index {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    weights(0.5 * (lo + hi))
}
