//! Every shipped strategy against its declared forecasting system, in one
//! place: supermartingale-multiplier validation at 1e-12 over a thousand
//! random situations plus straight prefixes out to depth 100.

use crate::forecast::{Gamble, IntervalForecast, Outcome};
use crate::rng::CounterRng;
use crate::selection::SelectionProcess;
use crate::strategy::{
    parity_masked, split_multiplier, tail_switch, BetDirection, CalibrationParams,
    CalibrationStrategy, EndpointBet, ExcessSubmartingale, HellingerHalf, HellingerNearHalf,
    Parity,
};
use crate::systems::{near_half_entry_step, ForecastingSystem};
use crate::tree::{validate_multiplier, MultiplierStrategy, Situation};

fn random_situations(seed: u64, count: usize, max_len: usize) -> Vec<Situation> {
    let rng = CounterRng::new(seed);
    (0..count)
        .map(|i| {
            let len = (rng.unit(i as u64, 0) * (max_len as f64 + 1.0)) as usize;
            let bits: Vec<Outcome> = (0..len.min(max_len))
                .map(|j| Outcome::from_bool(rng.unit(i as u64, 1 + j as u64) < 0.5))
                .collect();
            Situation::from_bits(bits)
        })
        .collect()
}

#[test]
fn every_shipped_strategy_validates_against_its_declared_system() {
    let mut situations = random_situations(20_240_101, 1000, 60);
    // Long straight prefixes cover depths the random sample misses.
    for len in 0..=100usize {
        situations.push(Situation::from_bits(vec![Outcome::Zero; len]));
        situations.push(Situation::from_bits(vec![Outcome::One; len]));
    }

    let half = ForecastingSystem::precise(0.5).unwrap();
    let near_half = ForecastingSystem::near_half();
    let band = IntervalForecast::new(0.3, 0.7).unwrap();
    let band_system = ForecastingSystem::stationary(band);
    let below_half = ForecastingSystem::stationary(IntervalForecast::new(0.35, 0.5).unwrap());
    let above_half = ForecastingSystem::stationary(IntervalForecast::new(0.5, 0.65).unwrap());

    let calibration = |sel: SelectionProcess| {
        let sub = ExcessSubmartingale::new(Gamble::identity(), band_system.clone());
        let params = CalibrationParams::new(0.25, sub.bound()).unwrap();
        CalibrationStrategy::new(sub, sel, params).unwrap()
    };
    let split = split_multiplier(calibration(SelectionProcess::All));

    // The tail switch turns a bet valid for the band [1/2 - 0.2, 1/2 + 0.2]
    // into one valid for the near-half system: from the entry step on, every
    // near-half forecast lies inside that band.
    let alpha = 0.2;
    let entry = near_half_entry_step(alpha).unwrap() as usize;
    let band_around_half = IntervalForecast::new(0.5 - alpha, 0.5 + alpha).unwrap();
    let switched_high = tail_switch(
        EndpointBet::new(band_around_half, 0.5, BetDirection::High).unwrap(),
        entry,
    )
    .unwrap();
    let switched_low = tail_switch(
        EndpointBet::new(band_around_half, 0.5, BetDirection::Low).unwrap(),
        entry,
    )
    .unwrap();

    let shipped: Vec<(Box<dyn MultiplierStrategy>, &ForecastingSystem)> = vec![
        (Box::new(HellingerHalf), &half),
        (Box::new(HellingerNearHalf), &near_half),
        (Box::new(parity_masked(HellingerHalf, Parity::Even)), &below_half),
        (Box::new(parity_masked(HellingerHalf, Parity::Odd)), &above_half),
        (Box::new(switched_high), &near_half),
        (Box::new(switched_low), &near_half),
        (
            Box::new(EndpointBet::new(band, 1.0, BetDirection::High).unwrap()),
            &band_system,
        ),
        (
            Box::new(EndpointBet::new(band, 0.125, BetDirection::Low).unwrap()),
            &band_system,
        ),
        (Box::new(calibration(SelectionProcess::All)), &band_system),
        (Box::new(calibration(SelectionProcess::EvenSteps)), &band_system),
        (Box::new(calibration(SelectionProcess::AfterOnes)), &band_system),
        (Box::new(split.zero_favoring), &band_system),
        (Box::new(split.one_favoring), &band_system),
    ];

    for (strategy, system) in &shipped {
        let report = validate_multiplier(strategy.as_ref(), system, &situations, 1e-12);
        assert!(
            report.is_valid(),
            "{} vs {}: {:?} / {:?}",
            strategy.name(),
            system.label(),
            report.violations.first(),
            report.negative_values.first()
        );
    }
}

/// Negative control: the validator must flag genuinely invalid pairings.
#[test]
fn mismatched_pairings_fail_validation() {
    let situations = random_situations(7, 200, 40);
    let report = validate_multiplier(
        &HellingerNearHalf,
        &ForecastingSystem::precise(0.5).unwrap(),
        &situations,
        1e-12,
    );
    assert!(!report.is_valid());

    // Without the tail switch, the band bet is invalid for the near-half
    // system: the early forecasts escape the band.
    let band = IntervalForecast::new(0.3, 0.7).unwrap();
    let unswitched = EndpointBet::new(band, 0.5, BetDirection::High).unwrap();
    let report = validate_multiplier(
        &unswitched,
        &ForecastingSystem::near_half(),
        &situations,
        1e-12,
    );
    assert!(!report.is_valid());
}
