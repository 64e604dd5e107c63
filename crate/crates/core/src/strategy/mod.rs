//! The Sceptic's strategy library: multiplier strategies and capital-process
//! transformers with analytic validity guarantees.
//!
//! Every construction here comes with a forecasting system it provably
//! validates against (upper expectation of the multiplier at most 1 in every
//! situation); the tests pin those guarantees numerically at tight
//! tolerances.

mod calibration;
mod endpoint;
mod hellinger;
mod mixture;
#[cfg(test)]
mod shipped_tests;
mod transform;

pub use calibration::{
    mixture_calibration, CalibrationParams, CalibrationStrategy, ExcessSubmartingale,
};
pub use endpoint::{BetDirection, EndpointBet};
pub use hellinger::{
    hellinger_half, hellinger_near_half, HellingerHalf, HellingerNearHalf,
};
pub use mixture::MixtureProcess;
pub use transform::{
    cap_and_mix, cap_trajectory, parity_masked, split_condition_holds, split_multiplier,
    tail_switch, CappedProcess, MultiplierSplit, Parity, ParityMasked, SplitMultipliers,
    SplitSide, TailSwitch,
};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum StrategyError {
    #[error("bet size must lie in (0, 1], got {0}")]
    InvalidBetSize(f64),
    #[error("calibration needs 0 < epsilon < B, got epsilon={epsilon}, b={b}")]
    InvalidCalibration { epsilon: f64, b: f64 },
    #[error("xi must lie in (0, 1/B), got xi={xi} with b={b}")]
    InvalidXi { xi: f64, b: f64 },
    #[error("mixture truncation order must be >= 1")]
    InvalidMixtureOrder,
    #[error("mixture weights must be positive and sum to at most 1, got total {0}")]
    InvalidMixtureWeights(f64),
    #[error("tail switch start must be >= 1")]
    InvalidTailSwitchStart,
}
