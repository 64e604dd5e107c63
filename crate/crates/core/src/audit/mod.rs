//! Finite-horizon randomness auditing: strategy batteries, selected-frequency
//! analysis, interval sweeps, and self-consistency simulations.
//!
//! None of this certifies that a sequence *is* random. A battery crossing a
//! Ville threshold `K` rejects randomness for the audited forecasting system
//! at level `1/K`; staying below it is merely absence of evidence.

mod battery;
mod simulation;
mod sweep;

pub use battery::{default_battery, validate_battery, Battery, BatteryValidation};
pub use simulation::{consistency_simulation, ConsistencyReport};
pub use sweep::{sweep_constant_intervals, SweepCell, SweepConfig, SweepReport};

use serde::Serialize;
use thiserror::Error;

use crate::forecast::{Gamble, IntervalForecast, Outcome};
use crate::selection::SelectionProcess;
use crate::systems::ForecastingSystem;
use crate::tree::{ville_threshold_verdict, TreeError, Verdict};

#[derive(Debug, Error)]
pub enum AuditError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("grid step {0} outside the supported range [0.01, 0.25]")]
    GridStep(f64),
    #[error("audit battery is empty")]
    EmptyBattery,
    #[error("horizon must be at least 1")]
    ZeroHorizon,
}

/// Average of the selected increments of the excess submartingale of `f`:
///
/// ```text
/// sum_{k<n} sel(w^k) [f(x_{k+1}) - E_lower(Γ(w^k), f)] / sum_{k<n} sel(w^k)
/// ```
///
/// and 0 when no step is selected.
pub fn selected_average(
    path: &[Outcome],
    selection: &SelectionProcess,
    f: Gamble,
    system: &ForecastingSystem,
) -> f64 {
    let mut count = 0.0f64;
    let mut total = 0.0f64;
    for k in 0..path.len() {
        let situation = &path[..k];
        if selection.selects(situation) {
            count += 1.0;
            total += f.value_on(path[k]) - system.forecast(situation).lower_expectation(f);
        }
    }
    if count == 0.0 {
        0.0
    } else {
        total / count
    }
}

/// Finite-sample slack for selected relative frequencies over `m` steps:
/// `4 sqrt(ln(max(m, 2)) / m)`. A deliberately loose envelope so false
/// alarms are negligible at horizons of 1e4 and up; a tunable, not a
/// theorem.
pub fn frequency_slack(selected_steps: usize) -> f64 {
    let m = selected_steps.max(2) as f64;
    4.0 * (m.ln() / m).sqrt()
}

/// Selected relative frequency of ones checked against an interval, with
/// slack. With no selected steps the frequency is undefined, not an error.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChurchCheck {
    pub selected_steps: usize,
    pub frequency: Option<f64>,
    pub slack: Option<f64>,
    pub lower: f64,
    pub upper: f64,
    pub within_bounds: Option<bool>,
}

/// Check the selected frequency of ones against `[l - slack, u + slack]`.
pub fn church_check(
    path: &[Outcome],
    selection: &SelectionProcess,
    interval: IntervalForecast,
) -> ChurchCheck {
    let mut selected = 0usize;
    let mut ones = 0usize;
    for k in 0..path.len() {
        if selection.selects(&path[..k]) {
            selected += 1;
            ones += path[k].bit() as usize;
        }
    }
    if selected == 0 {
        return ChurchCheck {
            selected_steps: 0,
            frequency: None,
            slack: None,
            lower: interval.lower(),
            upper: interval.upper(),
            within_bounds: None,
        };
    }
    let frequency = ones as f64 / selected as f64;
    let slack = frequency_slack(selected);
    let within =
        frequency >= interval.lower() - slack && frequency <= interval.upper() + slack;
    ChurchCheck {
        selected_steps: selected,
        frequency: Some(frequency),
        slack: Some(slack),
        lower: interval.lower(),
        upper: interval.upper(),
        within_bounds: Some(within),
    }
}

/// Configuration for a single audit run.
#[derive(Debug, Clone)]
pub struct AuditConfig {
    pub horizon: usize,
    /// Ville threshold `K`; rejection is at level `1/K`.
    pub threshold: f64,
    /// Selection processes summarized in the frequency section.
    pub selections: Vec<SelectionProcess>,
    pub parallel: bool,
}

impl AuditConfig {
    pub fn new(horizon: usize, threshold: f64) -> AuditConfig {
        AuditConfig {
            horizon,
            threshold,
            selections: vec![
                SelectionProcess::All,
                SelectionProcess::EvenSteps,
                SelectionProcess::OddSteps,
            ],
            parallel: true,
        }
    }
}

/// Per-strategy audit outcome. Contract violations surface here rather than
/// silently dropping the strategy.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum StrategyOutcome {
    Completed {
        verdict: Verdict,
        max_log_capital: f64,
        argmax_step: usize,
        final_log_capital: f64,
    },
    Failed {
        error: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct StrategyAudit {
    pub name: String,
    #[serde(flatten)]
    pub outcome: StrategyOutcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrequencySummary {
    pub selection: String,
    #[serde(flatten)]
    pub check: ChurchCheck,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub system: String,
    pub horizon: usize,
    pub threshold: f64,
    /// Reject iff any strategy's capital crossed the threshold.
    pub overall: Verdict,
    pub strategies: Vec<StrategyAudit>,
    pub frequencies: Vec<FrequencySummary>,
}

impl AuditReport {
    pub fn has_errors(&self) -> bool {
        self.strategies
            .iter()
            .any(|s| matches!(s.outcome, StrategyOutcome::Failed { .. }))
    }
}

/// Run every battery strategy's capital along the path and aggregate the
/// Ville verdicts; deterministic given its inputs.
pub fn audit(
    path: &[Outcome],
    system: &ForecastingSystem,
    battery: &Battery,
    config: &AuditConfig,
) -> Result<AuditReport, AuditError> {
    if battery.is_empty() {
        return Err(AuditError::EmptyBattery);
    }
    if config.horizon == 0 {
        return Err(AuditError::ZeroHorizon);
    }
    if config.horizon > path.len() {
        return Err(TreeError::HorizonExceedsPath {
            horizon: config.horizon,
            path_len: path.len(),
        }
        .into());
    }
    // Fail fast on a bad threshold before any capital runs.
    if config.threshold.is_nan() || config.threshold <= 1.0 {
        return Err(TreeError::InvalidThreshold(config.threshold).into());
    }

    let entries: Vec<_> = battery.to_vec();
    let audits = crate::par::map(config.parallel, entries, |strategy| {
        let name = strategy.name();
        let outcome = match strategy.log_trajectory(path, config.horizon) {
            Ok(traj) => match ville_threshold_verdict(&traj, config.threshold) {
                Ok(v) => StrategyOutcome::Completed {
                    verdict: v.verdict,
                    max_log_capital: v.max_log_capital,
                    argmax_step: v.argmax_step,
                    final_log_capital: traj.final_log(),
                },
                Err(e) => StrategyOutcome::Failed {
                    error: e.to_string(),
                },
            },
            Err(e) => StrategyOutcome::Failed {
                error: e.to_string(),
            },
        };
        StrategyAudit { name, outcome }
    });

    let overall = if audits.iter().any(|s| {
        matches!(
            s.outcome,
            StrategyOutcome::Completed {
                verdict: Verdict::Reject,
                ..
            }
        )
    }) {
        Verdict::Reject
    } else {
        Verdict::NoEvidence
    };

    let envelope = system.stationary_envelope();
    let frequencies = config
        .selections
        .iter()
        .map(|sel| FrequencySummary {
            selection: sel.to_string(),
            check: church_check(&path[..config.horizon], sel, envelope),
        })
        .collect();

    Ok(AuditReport {
        system: system.label(),
        horizon: config.horizon,
        threshold: config.threshold,
        overall,
        strategies: audits,
        frequencies,
    })
}
