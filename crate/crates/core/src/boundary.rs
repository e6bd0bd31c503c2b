//! Boundary regimes on agent balances: floors, debt caps, a reserve-ratio
//! bank with a global loan cap, upper bounds, interest and bankruptcy.
//!
//! Debt is tracked as the sum of negative balances. Whenever a transfer
//! pushes a balance below zero the bank lends the difference, and whenever
//! a negative balance rises toward zero the loan is repaid by the same
//! amount, so `BankState::loans_outstanding` always equals the total
//! negative money held by agents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::AgentLedger;

/// The constraint on individual (or aggregate) balances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryKind {
    /// Balances never drop below zero.
    NoDebt,
    /// Balances never drop below `-max_debt`.
    DebtCap { max_debt: f64 },
    /// Individual debt is unlimited but total debt is capped at
    /// `M_b (1 - R) / R`, where `R` is the required reserve ratio.
    ReserveRatio { ratio: f64 },
    /// No floor at all.
    Unlimited,
    /// Floor at zero and a ceiling at `max_balance`.
    UpperBound { max_balance: f64 },
    /// Floor at `-max_debt` and ceiling at `max_balance`.
    TwoSided { max_balance: f64, max_debt: f64 },
}

/// Per-sweep interest rates applied to positive and negative balances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterestRates {
    pub deposit: f64,
    pub loan: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPolicy {
    #[serde(flatten)]
    pub kind: BoundaryKind,
    /// Agents whose balance falls below `-bankruptcy_threshold` at a sweep
    /// boundary have their debt erased.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bankruptcy_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interest: Option<InterestRates>,
}

impl From<BoundaryKind> for BoundaryPolicy {
    fn from(kind: BoundaryKind) -> Self {
        BoundaryPolicy {
            kind,
            bankruptcy_threshold: None,
            interest: None,
        }
    }
}

impl BoundaryPolicy {
    pub fn no_debt() -> Self {
        BoundaryKind::NoDebt.into()
    }

    pub fn debt_cap(max_debt: f64) -> Self {
        BoundaryKind::DebtCap { max_debt }.into()
    }

    pub fn reserve_ratio(ratio: f64) -> Self {
        BoundaryKind::ReserveRatio { ratio }.into()
    }

    pub fn unlimited() -> Self {
        BoundaryKind::Unlimited.into()
    }

    pub fn upper_bound(max_balance: f64) -> Self {
        BoundaryKind::UpperBound { max_balance }.into()
    }

    pub fn two_sided(max_balance: f64, max_debt: f64) -> Self {
        BoundaryKind::TwoSided {
            max_balance,
            max_debt,
        }
        .into()
    }

    pub fn with_bankruptcy(mut self, threshold: f64) -> Self {
        self.bankruptcy_threshold = Some(threshold);
        self
    }

    pub fn with_interest(mut self, deposit: f64, loan: f64) -> Self {
        self.interest = Some(InterestRates { deposit, loan });
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Config(format!(
                    "{name} must be a positive finite number, got {v}"
                )))
            }
        };
        match self.kind {
            BoundaryKind::NoDebt | BoundaryKind::Unlimited => {}
            BoundaryKind::DebtCap { max_debt } => positive("max_debt", max_debt)?,
            BoundaryKind::ReserveRatio { ratio } => {
                if !(ratio > 0.0 && ratio <= 1.0) {
                    return Err(Error::Config(format!(
                        "reserve ratio must lie in (0, 1], got {ratio}"
                    )));
                }
            }
            BoundaryKind::UpperBound { max_balance } => positive("max_balance", max_balance)?,
            BoundaryKind::TwoSided {
                max_balance,
                max_debt,
            } => {
                positive("max_balance", max_balance)?;
                positive("max_debt", max_debt)?;
            }
        }
        if let Some(t) = self.bankruptcy_threshold {
            positive("bankruptcy_threshold", t)?;
        }
        if let Some(r) = self.interest {
            if !(r.deposit.is_finite() && r.loan.is_finite() && r.deposit > -1.0 && r.loan > -1.0) {
                return Err(Error::Config(format!(
                    "interest rates must be finite and greater than -1, got {r:?}"
                )));
            }
        }
        Ok(())
    }

    /// Lowest balance an agent may hold, if any.
    pub fn floor(&self) -> Option<f64> {
        match self.kind {
            BoundaryKind::NoDebt | BoundaryKind::UpperBound { .. } => Some(0.0),
            BoundaryKind::DebtCap { max_debt } | BoundaryKind::TwoSided { max_debt, .. } => {
                Some(-max_debt)
            }
            BoundaryKind::ReserveRatio { .. } | BoundaryKind::Unlimited => None,
        }
    }

    /// Highest balance an agent may hold, if any.
    pub fn ceiling(&self) -> Option<f64> {
        match self.kind {
            BoundaryKind::UpperBound { max_balance }
            | BoundaryKind::TwoSided { max_balance, .. } => Some(max_balance),
            _ => None,
        }
    }

    /// Whether a balance of `m` is compatible with the individual bounds.
    pub fn within_bounds(&self, m: f64) -> bool {
        self.floor().is_none_or(|f| m >= f) && self.ceiling().is_none_or(|c| m <= c)
    }
}

/// The aggregate banking state.
///
/// With a reserve ratio `R` the bank can have at most
/// `M_b (1 - R) / R` in loans outstanding; every other policy uses an
/// unbounded cap and only keeps the books.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankState {
    pub reserve_ratio: Option<f64>,
    pub loans_outstanding: f64,
    pub loan_cap: f64,
    /// Debt erased through bankruptcy; the bank's lost assets.
    pub written_off: f64,
}

impl BankState {
    pub fn new(policy: &BoundaryPolicy, monetary_base: f64) -> Self {
        let (reserve_ratio, loan_cap) = match policy.kind {
            BoundaryKind::ReserveRatio { ratio } => {
                (Some(ratio), monetary_base * (1.0 - ratio) / ratio)
            }
            _ => (None, f64::INFINITY),
        };
        BankState {
            reserve_ratio,
            loans_outstanding: 0.0,
            loan_cap,
            written_off: 0.0,
        }
    }
}

/// Why a transfer was refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BlockReason {
    InsufficientFunds,
    DebtCap,
    BankCap,
    UpperBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Admission {
    /// The transfer may proceed; the payload is the change in loans
    /// outstanding it causes (positive for new borrowing, negative for
    /// repayment).
    Admit {
        loan_change: f64,
    },
    Block(BlockReason),
}

impl Admission {
    pub fn is_admitted(&self) -> bool {
        matches!(self, Admission::Admit { .. })
    }
}

#[inline]
fn negative_part(m: f64) -> f64 {
    if m < 0.0 {
        -m
    } else {
        0.0
    }
}

/// Decide whether moving `amount` from a payer to a receiver is allowed.
///
/// The bank check looks at total loans *after* the transfer, so a
/// simultaneous repayment by a negative-balance receiver offsets new
/// borrowing by the payer.
#[inline]
pub fn admit_transfer(
    policy: &BoundaryPolicy,
    bank: &BankState,
    payer_balance: f64,
    receiver_balance: f64,
    amount: f64,
) -> Admission {
    let payer_after = payer_balance - amount;
    let receiver_after = receiver_balance + amount;

    match policy.kind {
        BoundaryKind::NoDebt | BoundaryKind::UpperBound { .. } => {
            if payer_balance < amount {
                return Admission::Block(BlockReason::InsufficientFunds);
            }
        }
        BoundaryKind::DebtCap { max_debt } | BoundaryKind::TwoSided { max_debt, .. } => {
            if payer_after < -max_debt {
                return Admission::Block(BlockReason::DebtCap);
            }
        }
        BoundaryKind::ReserveRatio { .. } | BoundaryKind::Unlimited => {}
    }
    if let Some(ceiling) = policy.ceiling() {
        if receiver_after > ceiling {
            return Admission::Block(BlockReason::UpperBound);
        }
    }

    let loan_change = negative_part(payer_after) - negative_part(payer_balance)
        + negative_part(receiver_after)
        - negative_part(receiver_balance);
    if loan_change > 0.0 && bank.loans_outstanding + loan_change > bank.loan_cap {
        return Admission::Block(BlockReason::BankCap);
    }
    Admission::Admit { loan_change }
}

/// Money created or destroyed by one interest accrual.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InterestFlux {
    pub deposit_interest: f64,
    pub loan_interest: f64,
}

impl InterestFlux {
    pub fn net(&self) -> f64 {
        self.deposit_interest + self.loan_interest
    }
}

/// Apply one sweep's worth of interest to every balance.
///
/// Positive balances grow by `1 + deposit`, negative balances by
/// `1 + loan` (debt deepens for a positive loan rate). The money created
/// is recorded on the ledger as external flux.
pub fn accrue_interest(ledger: &mut AgentLedger) -> InterestFlux {
    let Some(rates) = ledger.policy().interest else {
        return InterestFlux::default();
    };
    let mut flux = InterestFlux::default();
    let mut loans = 0.0;
    for m in ledger.balances_mut() {
        if *m > 0.0 {
            let delta = *m * rates.deposit;
            *m += delta;
            flux.deposit_interest += delta;
        } else if *m < 0.0 {
            let delta = *m * rates.loan;
            *m += delta;
            flux.loan_interest += delta;
        }
        loans += negative_part(*m);
    }
    ledger.bank_mut().loans_outstanding = loans;
    ledger.record_external_flux(flux.net());
    flux
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bankruptcy {
    pub agent: usize,
    pub erased_debt: f64,
}

/// Erase the debt of every agent below `-threshold`, in ascending agent
/// order. The bank loses the matching asset.
pub fn bankruptcy_scan(ledger: &mut AgentLedger) -> Vec<Bankruptcy> {
    let Some(threshold) = ledger.policy().bankruptcy_threshold else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (agent, m) in ledger.balances_mut().iter_mut().enumerate() {
        if *m < -threshold {
            out.push(Bankruptcy {
                agent,
                erased_debt: -*m,
            });
            *m = 0.0;
        }
    }
    let erased: f64 = out.iter().map(|b| b.erased_debt).sum();
    let bank = ledger.bank_mut();
    bank.loans_outstanding = (bank.loans_outstanding - erased).max(0.0);
    bank.written_off += erased;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bank_for(policy: &BoundaryPolicy, base: f64) -> BankState {
        BankState::new(policy, base)
    }

    #[test]
    fn no_debt_blocks_overdraft() {
        let p = BoundaryPolicy::no_debt();
        let b = bank_for(&p, 1000.0);
        assert_eq!(
            admit_transfer(&p, &b, 0.0, 2000.0, 1.0),
            Admission::Block(BlockReason::InsufficientFunds)
        );
        assert!(admit_transfer(&p, &b, 1.0, 2000.0, 1.0).is_admitted());
    }

    #[test]
    fn debt_cap_admits_down_to_the_floor() {
        let p = BoundaryPolicy::debt_cap(800.0);
        let b = bank_for(&p, 1000.0);
        assert_eq!(
            admit_transfer(&p, &b, 0.0, 0.0, 800.0),
            Admission::Admit { loan_change: 800.0 }
        );
        assert_eq!(
            admit_transfer(&p, &b, 0.0, 0.0, 800.5),
            Admission::Block(BlockReason::DebtCap)
        );
    }

    #[test]
    fn full_reserve_bank_is_no_debt() {
        let p = BoundaryPolicy::reserve_ratio(1.0);
        let b = bank_for(&p, 5000.0);
        assert_eq!(b.loan_cap, 0.0);
        let nd = BoundaryPolicy::no_debt();
        let nb = bank_for(&nd, 5000.0);
        for &(payer, amount) in &[(0.0, 1.0), (5.0, 5.0), (5.0, 5.5), (100.0, 3.0)] {
            assert_eq!(
                admit_transfer(&p, &b, payer, 10.0, amount).is_admitted(),
                admit_transfer(&nd, &nb, payer, 10.0, amount).is_admitted(),
                "payer {payer} amount {amount}"
            );
        }
    }

    #[test]
    fn bank_cap_counts_simultaneous_repayment() {
        let p = BoundaryPolicy::reserve_ratio(0.8);
        let mut b = bank_for(&p, 1000.0);
        assert!((b.loan_cap - 250.0).abs() < 1e-12);
        b.loans_outstanding = 250.0;
        // New borrowing of 50 with no offset exceeds the cap.
        assert_eq!(
            admit_transfer(&p, &b, 0.0, 10.0, 50.0),
            Admission::Block(BlockReason::BankCap)
        );
        // Receiver at -50 repays exactly what the payer borrows.
        assert_eq!(
            admit_transfer(&p, &b, 0.0, -50.0, 50.0),
            Admission::Admit { loan_change: 0.0 }
        );
    }

    #[test]
    fn upper_bound_blocks_receiver() {
        let p = BoundaryPolicy::upper_bound(100.0);
        let b = bank_for(&p, 0.0);
        assert_eq!(
            admit_transfer(&p, &b, 50.0, 95.0, 10.0),
            Admission::Block(BlockReason::UpperBound)
        );
        assert!(admit_transfer(&p, &b, 50.0, 90.0, 10.0).is_admitted());
    }

    #[test]
    fn unlimited_always_admits() {
        let p = BoundaryPolicy::unlimited();
        let b = bank_for(&p, 0.0);
        assert!(admit_transfer(&p, &b, -1e9, 0.0, 1e9).is_admitted());
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(BoundaryPolicy::reserve_ratio(0.0).validate().is_err());
        assert!(BoundaryPolicy::reserve_ratio(1.2).validate().is_err());
        assert!(BoundaryPolicy::debt_cap(-1.0).validate().is_err());
        assert!(BoundaryPolicy::no_debt()
            .with_bankruptcy(0.0)
            .validate()
            .is_err());
        assert!(BoundaryPolicy::unlimited()
            .with_interest(0.01, 0.02)
            .validate()
            .is_ok());
    }

    #[test]
    fn policy_json_shape() {
        let p = BoundaryPolicy::debt_cap(800.0).with_bankruptcy(1000.0);
        let v = serde_json::to_value(p).unwrap();
        assert_eq!(
            v,
            serde_json::json!({"type": "debt_cap", "max_debt": 800.0, "bankruptcy_threshold": 1000.0})
        );
        let back: BoundaryPolicy = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
