//! Martingale-theoretic analysis of binary sequences under interval-valued
//! forecasting systems.
//!
//! An interval forecast `[l, u]` is a commitment: `l` is a supremum buying
//! price and `u` an infimum selling price for the next outcome. A
//! forecasting system assigns such an interval to every finite bit string,
//! and a Sceptic tries to multiply their capital by betting against it.
//! Capital processes whose per-step multipliers have upper expectation at
//! most 1 are test supermartingales; by Ville's inequality one of them
//! exceeding `K` on a sequence is evidence, at level `1/K`, against the
//! sequence being random for the audited system.
//!
//! The crate provides:
//!
//! - local lower/upper expectations with their coherence properties
//!   ([`forecast`]),
//! - the event-tree machinery: capital recursion in log domain,
//!   supermartingale validation, finite-horizon expectations by backward
//!   induction ([`tree`]),
//! - named forecasting systems, including the alternating and near-half
//!   precise systems whose random sequences force non-degenerate stationary
//!   interval filters ([`systems`]),
//! - a strategy library with analytic validity guarantees ([`strategy`]),
//! - auditing, selected-frequency analysis, interval sweeps and
//!   self-consistency simulation ([`audit`]),
//! - seeded path generation with Reality playing inside a system ([`gen`]).
//!
//! With the default `parallel` feature, sweeps and simulations fan out via
//! rayon; results are merged in deterministic order, so parallel and
//! sequential runs produce identical reports.

pub mod audit;
pub mod forecast;
pub mod gen;
pub mod report;
pub mod rng;
pub mod selection;
pub mod strategy;
pub mod systems;
pub mod tree;

mod par;
#[cfg(test)]
pub(crate) mod testutil;

pub use forecast::{
    format_bits, lower_expectation, parse_bits, upper_expectation, ForecastError, Gamble,
    IntervalForecast, Outcome,
};
pub use selection::SelectionProcess;
pub use systems::{ForecastingSystem, SystemError};
pub use tree::{
    capital_from_multiplier, finite_horizon_lower_expectation, finite_horizon_upper_expectation,
    validate_multiplier, validate_supermartingale, ville_threshold_verdict, CapitalProcess,
    CapitalTrajectory, FiniteGamble, MultiplierStrategy, Situation, TreeError, TreeProcess,
    Verdict,
};
