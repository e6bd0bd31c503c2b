//! Exact stationary distribution of the fixed-step, no-debt chain on small
//! integer systems.
//!
//! The chain lives on compositions of `M` units of money among `N`
//! agents. Each step picks an ordered pair of distinct agents uniformly;
//! the first hands one unit to the second if it has one, otherwise the
//! state is unchanged.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest state space the enumeration will build.
pub const MAX_ORACLE_STATES: u128 = 100_000;

/// `C(n, k)` as an exact integer.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Number of ways to distribute `money` units among `agents` agents.
pub fn composition_count(agents: u64, money: u64) -> u128 {
    binomial(money + agents - 1, agents - 1)
}

/// Single-agent marginal when every composition is equally likely:
/// `P(m) = C(M - m + N - 2, N - 2) / C(M + N - 1, N - 1)`.
pub fn composition_marginal(agents: u64, money: u64) -> Vec<f64> {
    let total = composition_count(agents, money) as f64;
    (0..=money)
        .map(|m| binomial(money - m + agents - 2, agents - 2) as f64 / total)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleSolution {
    pub agents: usize,
    pub money: u64,
    pub states: usize,
    /// Single-agent marginal `P(m)` for `m = 0..=M`.
    pub marginal: Vec<f64>,
    /// Stationary probability of each enumerated state.
    pub state_probabilities: Vec<f64>,
    pub iterations: usize,
    /// L1 change of the last iteration.
    pub residual: f64,
}

fn enumerate_compositions(agents: usize, money: u64) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: u64, slots: usize, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            prefix.push(left as u32);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for m in 0..=left {
            prefix.push(m as u32);
            rec(prefix, left - m, slots - 1, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(agents), money, agents, &mut out);
    out
}

/// Build the transition matrix of the chain (blocked attempts become
/// self-loops) and solve for its stationary distribution by power
/// iteration on the lazy chain `(I + P) / 2`, which has the same stationary
/// law and is aperiodic.
pub fn enumerate_oracle(agents: usize, money: u64) -> Result<OracleSolution> {
    if agents < 2 {
        return Err(Error::Usage(format!(
            "oracle needs at least 2 agents, got {agents}"
        )));
    }
    let count = composition_count(agents as u64, money);
    if count > MAX_ORACLE_STATES {
        return Err(Error::StateSpaceTooLarge {
            states: count,
            limit: MAX_ORACLE_STATES,
        });
    }
    let states = enumerate_compositions(agents, money);
    let index: HashMap<&[u32], usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let pairs = (agents * (agents - 1)) as f64;
    let p_move = 1.0 / pairs;

    // Sparse rows: (target, probability); self-loop weight kept separately.
    let mut rows: Vec<Vec<usize>> = Vec::with_capacity(states.len());
    let mut stay = Vec::with_capacity(states.len());
    let mut scratch = vec![0u32; agents];
    for s in &states {
        let mut targets = Vec::new();
        let mut blocked = 0usize;
        for i in 0..agents {
            for j in 0..agents {
                if i == j {
                    continue;
                }
                if s[i] == 0 {
                    blocked += 1;
                    continue;
                }
                scratch.copy_from_slice(s);
                scratch[i] -= 1;
                scratch[j] += 1;
                targets.push(index[scratch.as_slice()]);
            }
        }
        rows.push(targets);
        stay.push(blocked as f64 * p_move);
    }

    let n = states.len();
    let mut pi = vec![0.0; n];
    // Start from the even split (or as close as integers allow).
    let start: Vec<u32> = (0..agents)
        .map(|a| (money / agents as u64 + u64::from((a as u64) < money % agents as u64)) as u32)
        .collect();
    pi[index[start.as_slice()]] = 1.0;
    let mut next = vec![0.0; n];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let max_iter = 2_000_000;
    while iterations < max_iter {
        for (x, (&v, &st)) in next.iter_mut().zip(pi.iter().zip(&stay)) {
            *x = v * (0.5 + 0.5 * st);
        }
        for (s, targets) in rows.iter().enumerate() {
            let w = 0.5 * pi[s] * p_move;
            if w == 0.0 {
                continue;
            }
            for &t in targets {
                next[t] += w;
            }
        }
        let total: f64 = next.iter().sum();
        residual = 0.0;
        for (x, v) in next.iter_mut().zip(&pi) {
            *x /= total;
            residual += (*x - v).abs();
        }
        std::mem::swap(&mut pi, &mut next);
        iterations += 1;
        if residual < 1e-15 {
            break;
        }
    }

    let mut marginal = vec![0.0; money as usize + 1];
    for (s, &p) in states.iter().zip(&pi) {
        // Every agent has the same marginal; average over agents.
        for &m in s {
            marginal[m as usize] += p / agents as f64;
        }
    }
    Ok(OracleSolution {
        agents,
        money,
        states: n,
        marginal,
        state_probabilities: pi,
        iterations,
        residual,
    })
}
