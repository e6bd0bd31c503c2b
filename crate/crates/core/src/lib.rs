//! Monte Carlo simulation of pairwise money exchange between agents, with
//! the statistics needed to check the resulting money distributions
//! against their predicted stationary forms.
//!
//! The main pieces:
//!
//! * [`ledger`]: agent balances and validated, conserving transfers.
//! * [`rules`]: how much money moves in a transaction.
//! * [`boundary`]: floors, debt caps, a reserve-ratio bank, interest,
//!   bankruptcy and upper bounds.
//! * [`engine`]: the sweep loop producing histogram snapshots.
//! * [`stats`]: entropy, fits, KS distances, tail exponents, stationarity
//!   and an exact enumeration oracle.
//! * [`kinetic`]: a master-equation solver for the distribution itself.
//! * [`harness`]: JSON experiment specs, replicates, sweeps and outputs.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary;
pub mod engine;
pub mod error;
pub mod harness;
pub mod kinetic;
pub mod ledger;
pub mod rules;
pub mod seed;
pub mod stats;

pub use boundary::{BoundaryKind, BoundaryPolicy};
pub use engine::{run_sweeps, simulate, RunOptions, RunRecord, Simulation, Snapshot};
pub use error::{Error, Result};
pub use ledger::{AgentLedger, MoneyMode, SimConfig, TransferOutcome, TransferStatus};
pub use rules::{ExchangeRule, RuleSpec};
