//! Self-consistency simulation: sample paths from a forecasting system and
//! audit each one against that same system. A forecaster who believes their
//! own forecasts expects the default battery to cross the Ville threshold on
//! at most a `1/K` fraction of paths.

use serde::Serialize;

use crate::gen::{sample_path, RealityPolicy};
use crate::rng::derive_seed;
use crate::systems::ForecastingSystem;
use crate::tree::Verdict;

use super::{audit, default_battery, AuditConfig, AuditError};

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub system: String,
    pub policy: String,
    pub n_paths: usize,
    pub horizon: usize,
    pub threshold: f64,
    pub base_seed: u64,
    pub rejected: usize,
    pub reject_fraction: f64,
    /// `1/K` plus three binomial standard deviations: the contract bound on
    /// the rejection fraction.
    pub bound: f64,
}

/// The contract bound `1/K + 3 sqrt((1/K)(1 - 1/K)/n)`.
pub fn reject_fraction_bound(threshold: f64, n_paths: usize) -> f64 {
    let p = 1.0 / threshold;
    p + 3.0 * (p * (1.0 - p) / n_paths as f64).sqrt()
}

/// Sample `n_paths` seeded paths from the system (path `i` uses the sub-seed
/// derived from `(base_seed, i)`), audit each against the system itself with
/// the default battery, and report the rejected fraction.
pub fn consistency_simulation(
    system: &ForecastingSystem,
    policy: RealityPolicy,
    n_paths: usize,
    horizon: usize,
    threshold: f64,
    base_seed: u64,
    parallel: bool,
) -> Result<ConsistencyReport, AuditError> {
    let battery = default_battery(system);
    let mut config = AuditConfig::new(horizon, threshold);
    config.selections.clear();
    // Audits already run side by side across paths.
    config.parallel = false;

    let verdicts = crate::par::map(parallel, (0..n_paths).collect::<Vec<_>>(), |i| {
        let seed = derive_seed(base_seed, i as u64);
        let path = sample_path(system, policy, seed, horizon);
        audit(&path, system, &battery, &config).map(|report| report.overall)
    });

    let mut rejected = 0usize;
    for verdict in verdicts {
        if verdict? == Verdict::Reject {
            rejected += 1;
        }
    }

    Ok(ConsistencyReport {
        system: system.label(),
        policy: policy.to_string(),
        n_paths,
        horizon,
        threshold,
        base_seed,
        rejected,
        reject_fraction: rejected as f64 / n_paths as f64,
        bound: reject_fraction_bound(threshold, n_paths),
    })
}
