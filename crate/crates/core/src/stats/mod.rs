//! Distributions, entropies, fits, tail exponents, stationarity verdicts
//! and exact small-system oracles.

mod entropy;
mod fit;
mod histogram;
mod ks;
pub mod oracle;
mod stationarity;

pub use entropy::{
    binned_exponential_entropy, discrete_exponential_entropy, entropy_per_agent, expectation,
    log_multiplicity, max_entropy_reference, money_temperature,
};
pub use fit::{
    fit_bounded_exponential, fit_exponential, fit_gamma, fit_two_sided, log_linear_slope,
    tail_exponent_hill, two_sided_max_entropy_slopes, BoundedExponentialFit, FitFamily, FitResult,
    HillEstimate, TwoSidedFit, DEFAULT_TAIL_FRACTION,
};
pub use histogram::MoneyHistogram;
pub use ks::{ks_discrete, ks_distance, ks_histograms, ks_sorted, ks_two_sample};
pub use oracle::{composition_marginal, enumerate_oracle, OracleSolution};
pub use stationarity::{
    stationarity_detector, window_histograms, window_series, StationarityParams,
    StationarityVerdict, WindowPoint,
};
