//! Transfer-amount rules.
//!
//! A rule is described by a serializable [`RuleSpec`] and instantiated as
//! an [`ExchangeRule`] once the population size is known (the random
//! saving-propensity rule draws one propensity per agent at that point).
//! After construction a rule is immutable and can be shared between
//! threads; per-call randomness comes from the caller's stream.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::MoneyMode;

/// Largest saving propensity handed out by the random-propensity rule.
/// Kept strictly below 1 so no agent freezes its whole balance.
pub const DEFAULT_LAMBDA_MAX: f64 = 1.0 - 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum RuleSpec {
    /// Every transaction moves the same amount.
    FixedAmount { amount: f64 },
    /// Moves `nu * scale` with `nu ~ U[0, 1)`. Without an explicit scale the
    /// current mean money per agent is used.
    UniformRandomFraction,
    /// Same as `UniformRandomFraction` with a fixed scale.
    UniformRandomScaled { scale: f64 },
    /// The payer hands over a fraction `gamma` of its balance.
    Multiplicative { gamma: f64 },
    /// Both agents keep `lambda` of their balance; the rest is pooled and
    /// split at random.
    SavingPropensity { lambda: f64 },
    /// Like `SavingPropensity` with a per-agent `lambda_i ~ U[0, lambda_max)`
    /// fixed at initialization.
    RandomSavingPropensity {
        #[serde(default = "default_lambda_max")]
        lambda_max: f64,
    },
}

fn default_lambda_max() -> f64 {
    DEFAULT_LAMBDA_MAX
}

impl RuleSpec {
    pub fn validate(&self, mode: MoneyMode) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        match *self {
            RuleSpec::FixedAmount { amount } => {
                if !(amount.is_finite() && amount > 0.0) {
                    return fail(format!("fixed amount must be positive, got {amount}"));
                }
                if mode == MoneyMode::Integer && amount.fract() != 0.0 {
                    return fail(format!(
                        "integer money mode needs an integral amount, got {amount}"
                    ));
                }
            }
            RuleSpec::UniformRandomFraction => {}
            RuleSpec::UniformRandomScaled { scale } => {
                if !(scale.is_finite() && scale >= 0.0) {
                    return fail(format!("scale must be nonnegative, got {scale}"));
                }
            }
            RuleSpec::Multiplicative { gamma } => {
                if !(gamma > 0.0 && gamma < 1.0) {
                    return fail(format!("gamma must lie in (0, 1), got {gamma}"));
                }
            }
            RuleSpec::SavingPropensity { lambda } => {
                if !(0.0..1.0).contains(&lambda) {
                    return fail(format!("lambda must lie in [0, 1), got {lambda}"));
                }
            }
            RuleSpec::RandomSavingPropensity { lambda_max } => {
                if !(lambda_max > 0.0 && lambda_max < 1.0) {
                    return fail(format!("lambda_max must lie in (0, 1), got {lambda_max}"));
                }
            }
        }
        if mode == MoneyMode::Integer && self.is_saving() {
            return fail("saving-propensity rules are not available in integer money mode".into());
        }
        Ok(())
    }

    /// Rules that are only defined for nonnegative balances.
    pub fn requires_nonnegative_balances(&self) -> bool {
        matches!(self, RuleSpec::Multiplicative { .. }) || self.is_saving()
    }

    pub fn is_saving(&self) -> bool {
        matches!(
            self,
            RuleSpec::SavingPropensity { .. } | RuleSpec::RandomSavingPropensity { .. }
        )
    }
}

/// An instantiated rule, ready to be queried per transaction.
#[derive(Debug, Clone, PartialEq)]
pub enum ExchangeRule {
    FixedAmount(f64),
    UniformRandomFraction { scale: Option<f64> },
    Multiplicative(f64),
    SavingPropensity(f64),
    RandomSavingPropensity(Vec<f64>),
}

/// What a rule asks the ledger to do with an ordered pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Proposal {
    /// Move this amount from the first agent to the second.
    Transfer(f64),
    /// Move this amount from the second agent to the first.
    Reverse(f64),
}

impl ExchangeRule {
    /// Instantiate `spec` for `num_agents` agents, drawing any per-agent
    /// parameters from `rng`.
    pub fn from_spec<R: Rng + ?Sized>(spec: &RuleSpec, num_agents: usize, rng: &mut R) -> Self {
        match *spec {
            RuleSpec::FixedAmount { amount } => ExchangeRule::FixedAmount(amount),
            RuleSpec::UniformRandomFraction => ExchangeRule::UniformRandomFraction { scale: None },
            RuleSpec::UniformRandomScaled { scale } => {
                ExchangeRule::UniformRandomFraction { scale: Some(scale) }
            }
            RuleSpec::Multiplicative { gamma } => ExchangeRule::Multiplicative(gamma),
            RuleSpec::SavingPropensity { lambda } => ExchangeRule::SavingPropensity(lambda),
            RuleSpec::RandomSavingPropensity { lambda_max } => {
                ExchangeRule::RandomSavingPropensity(
                    (0..num_agents)
                        .map(|_| rng.gen::<f64>() * lambda_max)
                        .collect(),
                )
            }
        }
    }

    /// Saving propensity of `agent`, or `None` for non-saving rules.
    pub fn propensity(&self, agent: usize) -> Option<f64> {
        match self {
            ExchangeRule::SavingPropensity(l) => Some(*l),
            ExchangeRule::RandomSavingPropensity(ls) => ls.get(agent).copied(),
            _ => None,
        }
    }

    /// Ask the rule what to do with the ordered pair `(i, j)` holding
    /// balances `m_i`, `m_j`. `mean_money` is the current average balance.
    #[inline]
    #[allow(clippy::too_many_arguments)]
    pub fn propose<R: Rng + ?Sized>(
        &self,
        i: usize,
        j: usize,
        m_i: f64,
        m_j: f64,
        mean_money: f64,
        mode: MoneyMode,
        rng: &mut R,
    ) -> Result<Proposal> {
        let amount = match *self {
            // Already integral in integer mode (checked by validation).
            ExchangeRule::FixedAmount(dm) => return Ok(Proposal::Transfer(dm)),
            ExchangeRule::UniformRandomFraction { scale } => {
                amount_uniform_random(scale.unwrap_or(mean_money), rng)
            }
            ExchangeRule::Multiplicative(gamma) => amount_multiplicative(gamma, m_i)?,
            ExchangeRule::SavingPropensity(_) | ExchangeRule::RandomSavingPropensity(_) => {
                let lambda_i = self.propensity(i).unwrap_or(0.0);
                let lambda_j = self.propensity(j).unwrap_or(0.0);
                let xi = rng.gen::<f64>();
                let (new_i, _) = saving_exchange(lambda_i, lambda_j, m_i, m_j, xi)?;
                return Ok(if new_i <= m_i {
                    Proposal::Transfer(m_i - new_i)
                } else {
                    Proposal::Reverse(new_i - m_i)
                });
            }
        };
        Ok(Proposal::Transfer(match mode {
            MoneyMode::Real => amount,
            MoneyMode::Integer => amount.round(),
        }))
    }
}

/// `nu * mean_money` with `nu ~ U[0, 1)`.
#[inline]
pub fn amount_uniform_random<R: Rng + ?Sized>(mean_money: f64, rng: &mut R) -> f64 {
    rng.gen::<f64>() * mean_money
}

/// `gamma * payer_balance`; only defined for nonnegative balances.
#[inline]
pub fn amount_multiplicative(gamma: f64, payer_balance: f64) -> Result<f64> {
    if payer_balance < 0.0 {
        return Err(Error::Usage(format!(
            "multiplicative rule needs a nonnegative payer balance, got {payer_balance}"
        )));
    }
    Ok(gamma * payer_balance)
}

/// Post-exchange balances when each agent saves a fraction of its money
/// and the unsaved remainder is split `xi : 1 - xi`.
///
/// With equal propensities this is
/// `m_i' = lambda m_i + xi (1 - lambda)(m_i + m_j)` and its complement.
/// The pair sum is conserved and each agent keeps at least its saved part.
#[inline]
pub fn saving_exchange(
    lambda_i: f64,
    lambda_j: f64,
    m_i: f64,
    m_j: f64,
    xi: f64,
) -> Result<(f64, f64)> {
    if m_i < 0.0 || m_j < 0.0 {
        return Err(Error::Usage(format!(
            "saving exchange needs nonnegative balances, got ({m_i}, {m_j})"
        )));
    }
    let pool = (1.0 - lambda_i) * m_i + (1.0 - lambda_j) * m_j;
    let new_i = lambda_i * m_i + xi * pool;
    let new_j = lambda_j * m_j + (1.0 - xi) * pool;
    Ok((new_i, new_j))
}
