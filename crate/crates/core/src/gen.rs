//! Seeded generation of outcome paths with Reality playing inside a
//! forecasting system.
//!
//! At every step the policy picks a probability inside the current interval
//! forecast, and the outcome is a Bernoulli draw from the counter-based
//! generator keyed by `(seed, step)`. Identical inputs give identical paths
//! regardless of evaluation order or thread count.

use std::fmt;

use crate::forecast::Outcome;
use crate::rng::CounterRng;
use crate::systems::ForecastingSystem;

/// How Reality selects a precise probability inside each interval forecast.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RealityPolicy {
    /// The interval midpoint; for precise systems this is the forecast
    /// itself.
    Midpoint,
    LowerEndpoint,
    UpperEndpoint,
    /// Draw the probability uniformly over the interval, then flip. A simple
    /// hierarchical policy, documented rather than canonical.
    UniformInInterval,
    /// Lower endpoint at odd steps, upper at even steps.
    AlternatingEndpoints,
}

impl fmt::Display for RealityPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RealityPolicy::Midpoint => "midpoint",
            RealityPolicy::LowerEndpoint => "lower",
            RealityPolicy::UpperEndpoint => "upper",
            RealityPolicy::UniformInInterval => "uniform",
            RealityPolicy::AlternatingEndpoints => "alternating",
        };
        write!(f, "{name}")
    }
}

impl std::str::FromStr for RealityPolicy {
    type Err = String;

    fn from_str(text: &str) -> Result<RealityPolicy, String> {
        match text {
            "midpoint" => Ok(RealityPolicy::Midpoint),
            "lower" => Ok(RealityPolicy::LowerEndpoint),
            "upper" => Ok(RealityPolicy::UpperEndpoint),
            "uniform" => Ok(RealityPolicy::UniformInInterval),
            "alternating" => Ok(RealityPolicy::AlternatingEndpoints),
            other => Err(format!(
                "unknown reality policy '{other}' (expected midpoint|lower|upper|uniform|alternating)"
            )),
        }
    }
}

const STREAM_PROBABILITY: u64 = 0;
const STREAM_OUTCOME: u64 = 1;

/// Sample `horizon` outcomes with Reality playing `policy` inside `system`.
pub fn sample_path(
    system: &ForecastingSystem,
    policy: RealityPolicy,
    seed: u64,
    horizon: usize,
) -> Vec<Outcome> {
    let rng = CounterRng::new(seed);
    let mut path: Vec<Outcome> = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let interval = system.forecast(&path);
        let p = match policy {
            RealityPolicy::Midpoint => interval.midpoint(),
            RealityPolicy::LowerEndpoint => interval.lower(),
            RealityPolicy::UpperEndpoint => interval.upper(),
            RealityPolicy::UniformInInterval => {
                interval.lower()
                    + rng.unit(k as u64, STREAM_PROBABILITY) * (interval.upper() - interval.lower())
            }
            RealityPolicy::AlternatingEndpoints => {
                if k % 2 == 1 {
                    interval.lower()
                } else {
                    interval.upper()
                }
            }
        };
        assert!(
            interval.contains(p),
            "realized probability {p} escaped the forecast {interval} at step {k}"
        );
        let one = rng.unit(k as u64, STREAM_OUTCOME) < p;
        path.push(Outcome::from_bool(one));
    }
    path
}
