//! Agent balances, validated pairwise transfers and conservation accounting.

use serde::{Deserialize, Serialize};

use crate::boundary::{admit_transfer, Admission, BankState, BlockReason, BoundaryPolicy};
use crate::error::{Error, Result};
use crate::rules::RuleSpec;

/// How money amounts are represented.
///
/// Balances are always stored as `f64`. In integer mode every balance and
/// every transferred amount is an exact integer (well inside the 2^53
/// range where `f64` integer arithmetic is exact), which makes
/// conservation exact and lets runs be compared against enumerated
/// integer-state oracles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoneyMode {
    #[default]
    Real,
    Integer,
}

/// Everything needed to start a single simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub num_agents: usize,
    pub initial_balance: f64,
    pub rule: RuleSpec,
    pub boundary: BoundaryPolicy,
    pub sweeps: u64,
    pub seed: u64,
    #[serde(default = "default_snapshot_every")]
    pub snapshot_every: u64,
    /// Histogram bin width; defaults to one twentieth of the mean balance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    #[serde(default)]
    pub money_mode: MoneyMode,
}

fn default_snapshot_every() -> u64 {
    1
}

impl SimConfig {
    pub fn new(
        num_agents: usize,
        initial_balance: f64,
        rule: RuleSpec,
        boundary: BoundaryPolicy,
    ) -> Self {
        SimConfig {
            num_agents,
            initial_balance,
            rule,
            boundary,
            sweeps: 0,
            seed: 0,
            snapshot_every: 1,
            bin_width: None,
            money_mode: MoneyMode::Real,
        }
    }

    pub fn sweeps(mut self, sweeps: u64) -> Self {
        self.sweeps = sweeps;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn snapshot_every(mut self, every: u64) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn bin_width(mut self, width: f64) -> Self {
        self.bin_width = Some(width);
        self
    }

    pub fn integer(mut self) -> Self {
        self.money_mode = MoneyMode::Integer;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_agents < 2 {
            return Err(Error::Config(format!(
                "num_agents must be at least 2, got {}",
                self.num_agents
            )));
        }
        if !(self.initial_balance.is_finite() && self.initial_balance >= 0.0) {
            return Err(Error::Config(format!(
                "initial_balance must be finite and nonnegative, got {}",
                self.initial_balance
            )));
        }
        if self.snapshot_every == 0 {
            return Err(Error::Config("snapshot_every must be positive".into()));
        }
        if let Some(w) = self.bin_width {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Config(format!(
                    "bin_width must be positive, got {w}"
                )));
            }
        }
        if self.money_mode == MoneyMode::Integer {
            if self.initial_balance.fract() != 0.0 {
                return Err(Error::Config(
                    "integer money mode needs an integral initial_balance".into(),
                ));
            }
            if self.boundary.interest.is_some() {
                return Err(Error::Config(
                    "interest accrual is not available in integer money mode".into(),
                ));
            }
        }
        self.rule.validate(self.money_mode)?;
        self.boundary.validate()?;
        if self.rule.requires_nonnegative_balances() && self.boundary.floor() != Some(0.0) {
            return Err(Error::Config(
                "multiplicative and saving rules need a policy with a floor at zero".into(),
            ));
        }
        if !self.boundary.within_bounds(self.initial_balance) {
            return Err(Error::Config(format!(
                "initial_balance {} violates the boundary policy",
                self.initial_balance
            )));
        }
        Ok(())
    }

    /// Bin width used for snapshots.
    pub fn effective_bin_width(&self) -> f64 {
        self.bin_width
            .unwrap_or_else(|| default_bin_width(self.initial_balance))
    }
}

/// One twentieth of the mean money, or 1 when there is no money at all.
pub fn default_bin_width(mean_money: f64) -> f64 {
    if mean_money.abs() > 0.0 {
        mean_money.abs() / 20.0
    } else {
        1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransferStatus {
    Executed,
    BlockedInsufficientFunds,
    BlockedDebtCap,
    BlockedBankCap,
    BlockedUpperBound,
}

impl From<BlockReason> for TransferStatus {
    fn from(r: BlockReason) -> Self {
        match r {
            BlockReason::InsufficientFunds => TransferStatus::BlockedInsufficientFunds,
            BlockReason::DebtCap => TransferStatus::BlockedDebtCap,
            BlockReason::BankCap => TransferStatus::BlockedBankCap,
            BlockReason::UpperBound => TransferStatus::BlockedUpperBound,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferOutcome {
    pub status: TransferStatus,
    pub amount: f64,
    pub payer: usize,
    pub receiver: usize,
}

impl TransferOutcome {
    pub fn executed(&self) -> bool {
        self.status == TransferStatus::Executed
    }
}

/// The full mutable state of one simulation.
#[derive(Debug, Clone)]
pub struct AgentLedger {
    balances: Vec<f64>,
    monetary_base: f64,
    policy: BoundaryPolicy,
    bank: BankState,
    transaction_count: u64,
    external_flux: f64,
    mode: MoneyMode,
}

impl AgentLedger {
    /// Give every agent the same endowment.
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let balances = vec![config.initial_balance; config.num_agents];
        Self::build(balances, config.boundary, config.money_mode)
    }

    /// Start from arbitrary balances. The monetary base is their sum.
    pub fn from_balances(
        balances: Vec<f64>,
        policy: BoundaryPolicy,
        mode: MoneyMode,
    ) -> Result<Self> {
        if balances.len() < 2 {
            return Err(Error::Config(format!(
                "need at least 2 agents, got {}",
                balances.len()
            )));
        }
        policy.validate()?;
        if let Some(bad) = balances
            .iter()
            .find(|m| !m.is_finite() || !policy.within_bounds(**m))
        {
            return Err(Error::Config(format!(
                "initial balance {bad} violates the boundary policy"
            )));
        }
        if mode == MoneyMode::Integer && balances.iter().any(|m| m.fract() != 0.0) {
            return Err(Error::Config(
                "integer money mode needs integral balances".into(),
            ));
        }
        Self::build(balances, policy, mode)
    }

    fn build(balances: Vec<f64>, policy: BoundaryPolicy, mode: MoneyMode) -> Result<Self> {
        let monetary_base: f64 = balances.iter().sum();
        let mut bank = BankState::new(&policy, monetary_base);
        bank.loans_outstanding = balances.iter().map(|m| (-m).max(0.0)).sum();
        Ok(AgentLedger {
            balances,
            monetary_base,
            policy,
            bank,
            transaction_count: 0,
            external_flux: 0.0,
            mode,
        })
    }

    pub fn balances(&self) -> &[f64] {
        &self.balances
    }

    pub(crate) fn balances_mut(&mut self) -> &mut [f64] {
        &mut self.balances
    }

    pub fn num_agents(&self) -> usize {
        self.balances.len()
    }

    pub fn monetary_base(&self) -> f64 {
        self.monetary_base
    }

    pub fn policy(&self) -> &BoundaryPolicy {
        &self.policy
    }

    pub fn bank(&self) -> &BankState {
        &self.bank
    }

    pub(crate) fn bank_mut(&mut self) -> &mut BankState {
        &mut self.bank
    }

    pub fn mode(&self) -> MoneyMode {
        self.mode
    }

    pub fn transaction_count(&self) -> u64 {
        self.transaction_count
    }

    /// Net money injected by interest since initialization.
    pub fn external_flux(&self) -> f64 {
        self.external_flux
    }

    pub(crate) fn record_external_flux(&mut self, amount: f64) {
        self.external_flux += amount;
    }

    pub fn total_money(&self) -> f64 {
        self.balances.iter().sum()
    }

    pub fn mean_money(&self) -> f64 {
        self.total_money() / self.balances.len() as f64
    }

    /// Sum of positive balances.
    pub fn positive_money(&self) -> f64 {
        self.balances.iter().filter(|m| **m > 0.0).sum()
    }

    /// Sum of the magnitudes of negative balances.
    pub fn debt(&self) -> f64 {
        self.balances.iter().filter(|m| **m < 0.0).map(|m| -m).sum()
    }

    /// `sum(balances) - M_b - interest flux - written-off debt`, which is zero
    /// up to rounding under every rule and policy.
    pub fn conservation_residual(&self) -> f64 {
        self.total_money() - self.monetary_base - self.external_flux - self.bank.written_off
    }

    /// Move `amount` from `payer` to `receiver` if the boundary policy allows.
    ///
    /// Blocked transfers leave every balance untouched but still count as
    /// an attempted transaction.
    pub fn attempt_transfer(
        &mut self,
        payer: usize,
        receiver: usize,
        amount: f64,
    ) -> Result<TransferOutcome> {
        let n = self.balances.len();
        if payer >= n || receiver >= n {
            return Err(Error::Usage(format!(
                "agent index out of range (payer {payer}, receiver {receiver}, {n} agents)"
            )));
        }
        if payer == receiver {
            return Err(Error::Usage(format!(
                "payer and receiver are both agent {payer}"
            )));
        }
        if !(amount >= 0.0 && amount.is_finite()) {
            return Err(Error::Usage(format!(
                "transfer amount must be nonnegative, got {amount}"
            )));
        }
        if self.mode == MoneyMode::Integer && amount.fract() != 0.0 {
            return Err(Error::Usage(format!(
                "integer money mode cannot transfer {amount}"
            )));
        }
        Ok(self.transfer_unchecked(payer, receiver, amount))
    }

    #[inline]
    pub(crate) fn transfer_unchecked(
        &mut self,
        payer: usize,
        receiver: usize,
        amount: f64,
    ) -> TransferOutcome {
        TransferOutcome {
            status: self.apply_transfer(payer, receiver, amount),
            amount,
            payer,
            receiver,
        }
    }

    #[inline(always)]
    pub(crate) fn apply_transfer(
        &mut self,
        payer: usize,
        receiver: usize,
        amount: f64,
    ) -> TransferStatus {
        self.transaction_count += 1;
        let pb = self.balances[payer];
        let rb = self.balances[receiver];
        match admit_transfer(&self.policy, &self.bank, pb, rb, amount) {
            Admission::Admit { loan_change } => {
                self.balances[payer] = pb - amount;
                self.balances[receiver] = rb + amount;
                if loan_change != 0.0 {
                    self.bank.loans_outstanding += loan_change;
                }
                TransferStatus::Executed
            }
            Admission::Block(reason) => reason.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::RuleSpec;

    fn ledger(balances: &[f64], policy: BoundaryPolicy) -> AgentLedger {
        AgentLedger::from_balances(balances.to_vec(), policy, MoneyMode::Real).unwrap()
    }

    #[test]
    fn uniform_endowment() {
        let cfg = SimConfig::new(
            500,
            1000.0,
            RuleSpec::UniformRandomFraction,
            BoundaryPolicy::no_debt(),
        );
        let l = AgentLedger::new(&cfg).unwrap();
        assert!(l.balances().iter().all(|&m| m == 1000.0));
        assert_eq!(l.monetary_base(), 500_000.0);
        assert_eq!(l.transaction_count(), 0);

        let cfg = SimConfig::new(
            2,
            0.0,
            RuleSpec::UniformRandomFraction,
            BoundaryPolicy::no_debt(),
        );
        let l = AgentLedger::new(&cfg).unwrap();
        assert_eq!(l.balances(), &[0.0, 0.0]);
        assert_eq!(l.monetary_base(), 0.0);

        let cfg = SimConfig::new(
            3,
            1.0,
            RuleSpec::UniformRandomFraction,
            BoundaryPolicy::no_debt(),
        );
        assert_eq!(AgentLedger::new(&cfg).unwrap().monetary_base(), 3.0);
    }

    #[test]
    fn rejects_bad_configs() {
        let rule = RuleSpec::FixedAmount { amount: 1.0 };
        assert!(matches!(
            AgentLedger::new(&SimConfig::new(
                1,
                10.0,
                rule.clone(),
                BoundaryPolicy::no_debt()
            )),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            AgentLedger::new(&SimConfig::new(
                10,
                -1.0,
                rule.clone(),
                BoundaryPolicy::no_debt()
            )),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            AgentLedger::new(&SimConfig::new(10, 1.5, rule, BoundaryPolicy::no_debt()).integer()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn executed_transfer_conserves_pair_sum() {
        let mut l = ledger(&[1000.0, 1000.0], BoundaryPolicy::no_debt());
        let out = l.attempt_transfer(0, 1, 200.0).unwrap();
        assert_eq!(out.status, TransferStatus::Executed);
        assert_eq!(l.balances(), &[800.0, 1200.0]);
        assert_eq!(l.transaction_count(), 1);
    }

    #[test]
    fn blocked_transfer_leaves_state_and_counts() {
        let mut l = ledger(&[0.0, 2000.0], BoundaryPolicy::no_debt());
        let out = l.attempt_transfer(0, 1, 1.0).unwrap();
        assert_eq!(out.status, TransferStatus::BlockedInsufficientFunds);
        assert_eq!(l.balances(), &[0.0, 2000.0]);
        assert_eq!(l.transaction_count(), 1);
    }

    #[test]
    fn debt_cap_borrows_the_difference() {
        let mut l = ledger(&[0.0, 2000.0], BoundaryPolicy::debt_cap(800.0));
        let out = l.attempt_transfer(0, 1, 500.0).unwrap();
        assert!(out.executed());
        assert_eq!(l.balances(), &[-500.0, 2500.0]);
        assert_eq!(l.bank().loans_outstanding, 500.0);
        assert_eq!(l.debt(), 500.0);
        assert_eq!(l.positive_money(), l.monetary_base() + l.debt());
        // Repayment when the debtor receives money.
        l.attempt_transfer(1, 0, 300.0).unwrap();
        assert_eq!(l.bank().loans_outstanding, 200.0);
        assert_eq!(
            l.attempt_transfer(0, 1, 700.0).unwrap().status,
            TransferStatus::BlockedDebtCap
        );
    }

    #[test]
    fn usage_errors_are_not_blocks() {
        let mut l = ledger(&[10.0, 10.0], BoundaryPolicy::no_debt());
        assert!(matches!(
            l.attempt_transfer(0, 2, 1.0),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            l.attempt_transfer(0, 0, 1.0),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            l.attempt_transfer(0, 1, -1.0),
            Err(Error::Usage(_))
        ));
        assert_eq!(l.transaction_count(), 0);
    }
}
