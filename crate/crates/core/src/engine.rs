//! The sweep loop: random ordered pairs, rule queries, validated
//! transfers and per-sweep policy hooks.
//!
//! One sweep is `N` transaction attempts. Interest (if configured) and then
//! bankruptcy (if configured) are applied after every sweep.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{accrue_interest, bankruptcy_scan};
use crate::error::Result;
use crate::ledger::{AgentLedger, SimConfig, TransferStatus};
use crate::rules::{ExchangeRule, Proposal};
use crate::seed::{replicate_seed, rng_from_seed, SimRng};
use crate::stats::MoneyHistogram;

/// State of the population at the end of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub sweep: u64,
    pub histogram: MoneyHistogram,
    /// Raw balances; empty when the run was told not to keep them.
    #[serde(skip)]
    pub balances: Vec<f64>,
}

impl Snapshot {
    pub fn new(sweep: u64, balances: Vec<f64>, bin_width: f64) -> Self {
        Snapshot {
            sweep,
            histogram: MoneyHistogram::from_samples(&balances, bin_width),
            balances,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub snapshot_every: u64,
    pub bin_width: f64,
    pub keep_balances: bool,
}

impl RunOptions {
    pub fn from_config(config: &SimConfig) -> Self {
        RunOptions {
            snapshot_every: config.snapshot_every,
            bin_width: config.effective_bin_width(),
            keep_balances: true,
        }
    }
}

/// Counters collected while sweeping.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub attempts: u64,
    pub executed: u64,
    pub blocked_insufficient_funds: u64,
    pub blocked_debt_cap: u64,
    pub blocked_bank_cap: u64,
    pub blocked_upper_bound: u64,
    pub bankruptcies: u64,
    pub erased_debt: f64,
    /// Net money created by interest after each sweep.
    #[serde(skip)]
    pub interest_flux: Vec<f64>,
}

impl RunStats {
    fn record(&mut self, status: TransferStatus) {
        self.attempts += 1;
        match status {
            TransferStatus::Executed => self.executed += 1,
            TransferStatus::BlockedInsufficientFunds => self.blocked_insufficient_funds += 1,
            TransferStatus::BlockedDebtCap => self.blocked_debt_cap += 1,
            TransferStatus::BlockedBankCap => self.blocked_bank_cap += 1,
            TransferStatus::BlockedUpperBound => self.blocked_upper_bound += 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub snapshots: Vec<Snapshot>,
    pub stats: RunStats,
}

impl RunRecord {
    pub fn last(&self) -> &Snapshot {
        self.snapshots
            .last()
            .expect("a run always has the initial snapshot")
    }

    /// Balances of the last `count` snapshots, concatenated.
    pub fn pooled_balances(&self, count: usize) -> Vec<f64> {
        let start = self.snapshots.len().saturating_sub(count);
        self.snapshots[start..]
            .iter()
            .flat_map(|s| s.balances.iter().copied())
            .collect()
    }

    /// Merged histogram of the last `count` snapshots.
    pub fn pooled_histogram(&self, count: usize) -> MoneyHistogram {
        let start = self.snapshots.len().saturating_sub(count);
        let mut h = MoneyHistogram::new(self.snapshots[0].histogram.bin_width());
        for s in &self.snapshots[start..] {
            h.merge(&s.histogram).expect("snapshots share a bin width");
        }
        h
    }
}

/// Uniform ordered pair of distinct agents, both taken from one 64-bit
/// draw by multiply-shift (bias below `n / 2^32`).
#[inline]
fn pick_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let r = rng.next_u64();
    let i = (((r >> 32) * n as u64) >> 32) as usize;
    let mut j = (((r & 0xffff_ffff) * (n as u64 - 1)) >> 32) as usize;
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// Advance `ledger` by `sweeps` sweeps, returning a snapshot at sweep 0 and
/// every `snapshot_every` sweeps after it.
pub fn run_sweeps<R: Rng + ?Sized>(
    ledger: &mut AgentLedger,
    rule: &ExchangeRule,
    sweeps: u64,
    options: &RunOptions,
    rng: &mut R,
) -> Result<RunRecord> {
    let n = ledger.num_agents();
    let mode = ledger.mode();
    let has_interest = ledger.policy().interest.is_some();
    let has_bankruptcy = ledger.policy().bankruptcy_threshold.is_some();
    let snap = |ledger: &AgentLedger, sweep: u64| {
        let h = MoneyHistogram::from_samples(ledger.balances(), options.bin_width);
        Snapshot {
            sweep,
            histogram: h,
            balances: if options.keep_balances {
                ledger.balances().to_vec()
            } else {
                Vec::new()
            },
        }
    };

    let mut stats = RunStats::default();
    let mut snapshots = vec![snap(ledger, 0)];
    let mut mean_money = ledger.mean_money();
    for sweep in 1..=sweeps {
        for _ in 0..n {
            let (i, j) = pick_pair(n, rng);
            let (mi, mj) = (ledger.balances()[i], ledger.balances()[j]);
            let status = match rule.propose(i, j, mi, mj, mean_money, mode, rng)? {
                Proposal::Transfer(a) => ledger.apply_transfer(i, j, a),
                Proposal::Reverse(a) => ledger.apply_transfer(j, i, a),
            };
            stats.record(status);
        }
        if has_interest {
            stats.interest_flux.push(accrue_interest(ledger).net());
        }
        if has_bankruptcy {
            for b in bankruptcy_scan(ledger) {
                stats.bankruptcies += 1;
                stats.erased_debt += b.erased_debt;
            }
        }
        if has_interest || has_bankruptcy {
            mean_money = ledger.mean_money();
        }
        if sweep % options.snapshot_every == 0 {
            snapshots.push(snap(ledger, sweep));
        }
    }
    Ok(RunRecord { snapshots, stats })
}

/// A fully configured single run: ledger, instantiated rule and stream.
pub struct Simulation {
    pub config: SimConfig,
    pub ledger: AgentLedger,
    pub rule: ExchangeRule,
    pub rng: SimRng,
}

impl Simulation {
    /// Set up replicate `replicate` of `config`. Per-agent rule parameters
    /// are drawn from the replicate's own stream before any dynamics.
    pub fn new(config: &SimConfig, replicate: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = rng_from_seed(replicate_seed(config.seed, replicate));
        let ledger = AgentLedger::new(config)?;
        let rule = ExchangeRule::from_spec(&config.rule, config.num_agents, &mut rng);
        Ok(Simulation {
            config: config.clone(),
            ledger,
            rule,
            rng,
        })
    }

    pub fn run(&mut self) -> Result<RunRecord> {
        let options = RunOptions::from_config(&self.config);
        self.run_with(self.config.sweeps, &options)
    }

    pub fn run_with(&mut self, sweeps: u64, options: &RunOptions) -> Result<RunRecord> {
        run_sweeps(&mut self.ledger, &self.rule, sweeps, options, &mut self.rng)
    }
}

/// Run replicate 0 of `config` to completion.
pub fn simulate(config: &SimConfig) -> Result<RunRecord> {
    Simulation::new(config, 0)?.run()
}
