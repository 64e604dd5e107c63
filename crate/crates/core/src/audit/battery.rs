//! Battery construction: the default set of capital processes audited
//! against a forecasting system.
//!
//! The default battery is built as a handful of cash-hedged mixtures whose
//! weights sum to 1, so the battery as a whole spends a single unit of
//! Ville budget: the probability that *any* entry crosses the threshold `K`
//! under the audited system is at most about `1/(K-1)`. Running the raw
//! components side by side instead would multiply the false-rejection rate
//! by the battery size.

use std::sync::Arc;

use crate::forecast::Gamble;
use crate::selection::SelectionProcess;
use crate::strategy::{
    mixture_calibration, parity_masked, BetDirection, EndpointBet, HellingerHalf,
    HellingerNearHalf, MixtureProcess, Parity,
};
use crate::systems::ForecastingSystem;
use crate::tree::{
    validate_supermartingale, CapitalProcess, Situation, TreeProcess,
};

/// A list of named capital processes run side by side in an audit.
pub type Battery = Vec<Arc<dyn CapitalProcess>>;

/// Bet sizes used by the endpoint-bet family.
pub const DEFAULT_BET_SIZES: [f64; 4] = [1.0, 0.5, 0.25, 0.125];

/// Truncation order of the calibration mixtures.
pub const DEFAULT_MIXTURE_ORDER: u32 = 20;

fn endpoint_family(system: &ForecastingSystem) -> Vec<Arc<dyn CapitalProcess>> {
    let envelope = system.stationary_envelope();
    let mut bets: Vec<Arc<dyn CapitalProcess>> = Vec::new();
    for direction in [BetDirection::High, BetDirection::Low] {
        for lam in DEFAULT_BET_SIZES {
            let bet = EndpointBet::new(envelope, lam, direction)
                .expect("default bet sizes are in (0, 1]");
            bets.push(Arc::new(bet));
        }
    }
    bets
}

fn calibration_family(
    system: &ForecastingSystem,
    gamble: Gamble,
    label: &str,
    weight: f64,
) -> MixtureProcess {
    let selections = [
        SelectionProcess::All,
        SelectionProcess::EvenSteps,
        SelectionProcess::OddSteps,
    ];
    let components: Vec<Arc<dyn CapitalProcess>> = selections
        .iter()
        .map(|sel| {
            Arc::new(
                mixture_calibration(system, gamble, sel, DEFAULT_MIXTURE_ORDER)
                    .expect("default mixture order is positive"),
            ) as Arc<dyn CapitalProcess>
        })
        .collect();
    MixtureProcess::equal_weights(
        format!("calibration-family({label}, sel=all/even/odd)"),
        weight,
        components,
    )
    .expect("weights sum below 1")
}

/// System-specific instruments: the Hellinger pair and its parity maskings,
/// valid only when the envelope pins an endpoint at exactly 1/2 (or the
/// system is the near-half one).
fn special_family(system: &ForecastingSystem) -> Vec<Arc<dyn CapitalProcess>> {
    let mut extras: Vec<Arc<dyn CapitalProcess>> = Vec::new();
    if matches!(system, ForecastingSystem::NearHalf) {
        extras.push(Arc::new(HellingerNearHalf));
    }
    if let ForecastingSystem::Stationary(interval) = system {
        let at_half = |x: f64| x == 0.5;
        if at_half(interval.lower()) && at_half(interval.upper()) {
            extras.push(Arc::new(HellingerHalf));
        }
        // Even steps forecast above 1/2, so the even-masked fair-coin
        // multiplier is valid whenever the upper bound is exactly 1/2;
        // dually for odd masking and the lower bound.
        if at_half(interval.upper()) && !at_half(interval.lower()) {
            extras.push(Arc::new(parity_masked(HellingerHalf, Parity::Even)));
        }
        if at_half(interval.lower()) && !at_half(interval.upper()) {
            extras.push(Arc::new(parity_masked(HellingerHalf, Parity::Odd)));
        }
    }
    extras
}

/// The default audit battery for a system: endpoint bets on the stationary
/// envelope, calibration mixtures on the system itself for the identity
/// gamble and its negation, and any system-specific instruments — each entry
/// hedged with cash so the entry weights sum to 1.
pub fn default_battery(system: &ForecastingSystem) -> Battery {
    let specials = special_family(system);
    let weight = if specials.is_empty() { 1.0 / 3.0 } else { 0.25 };

    let mut battery: Battery = Vec::new();
    battery.push(Arc::new(
        MixtureProcess::equal_weights(
            format!("endpoint-bets(I={})", system.stationary_envelope()),
            weight,
            endpoint_family(system),
        )
        .expect("weights sum below 1"),
    ));
    battery.push(Arc::new(calibration_family(
        system,
        Gamble::identity(),
        "f=identity",
        weight,
    )));
    battery.push(Arc::new(calibration_family(
        system,
        -Gamble::identity(),
        "f=neg-identity",
        weight,
    )));
    if !specials.is_empty() {
        battery.push(Arc::new(
            MixtureProcess::equal_weights("special-instruments", weight, specials)
                .expect("weights sum below 1"),
        ));
    }
    battery
}

/// Validation summary for one battery entry, checked as a supermartingale
/// on the complete tree of the given depth.
#[derive(Debug)]
pub struct BatteryValidation {
    pub entry: String,
    pub violations: Vec<(Situation, f64)>,
}

/// Validate every battery entry as a supermartingale for `system` on the
/// complete subtree of depth `depth`.
pub fn validate_battery(
    battery: &Battery,
    system: &ForecastingSystem,
    depth: usize,
    tol: f64,
) -> Result<Vec<BatteryValidation>, crate::tree::TreeError> {
    let mut results = Vec::with_capacity(battery.len());
    for entry in battery {
        let tree = TreeProcess::from_capital_process(entry.as_ref(), depth)?;
        let report = validate_supermartingale(&tree, system, tol);
        results.push(BatteryValidation {
            entry: entry.name(),
            violations: report
                .violations
                .into_iter()
                .map(|v| (v.situation, v.upper_difference))
                .collect(),
        });
    }
    Ok(results)
}
