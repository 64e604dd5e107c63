//! The two Hellinger-type multiplier processes built on the near-half
//! forecast sequence `p_n`.
//!
//! At step `n` (1-based, played at situations of length `n - 1`):
//!
//! ```text
//! M_half(x)      = e^{1/(2(n+1))} * sqrt(2 p~_n(x))
//! M_near_half(x) = e^{1/(2(n+1))} / sqrt(2 p~_n(x))
//! ```
//!
//! with `p~_n(1) = p_n` and `p~_n(0) = 1 - p_n`. The first has precise
//! expectation exactly 1 under the fair coin, the second exactly 1 under
//! `p_n`, and their pointwise product is `e^{1/(n+1)}` whatever the outcome:
//! the joint log capital after `n` steps equals the harmonic tail
//! `sum_{k=1}^{n} 1/(k+1)` on every path. Since that sum diverges, at least
//! one of the two capitals must explode, which is what makes the pair a
//! useful audit instrument.

use crate::forecast::{Gamble, Outcome};
use crate::systems::near_half_probability;
use crate::tree::MultiplierStrategy;

/// The multiplier gamble betting that outcomes follow the fair coin.
pub fn hellinger_half(n: u64) -> Gamble {
    let p = near_half_probability(n).expect("step index >= 1");
    let scale = (0.5 / (n as f64 + 1.0)).exp();
    Gamble::new(scale * (2.0 * p).sqrt(), scale * (2.0 * (1.0 - p)).sqrt())
}

/// The multiplier gamble betting that outcomes follow the near-half
/// forecasts `p_n`.
pub fn hellinger_near_half(n: u64) -> Gamble {
    let p = near_half_probability(n).expect("step index >= 1");
    let scale = (0.5 / (n as f64 + 1.0)).exp();
    Gamble::new(scale / (2.0 * p).sqrt(), scale / (2.0 * (1.0 - p)).sqrt())
}

/// Strategy form of [`hellinger_half`]: a supermartingale multiplier for the
/// stationary precise fair-coin system.
#[derive(Debug, Clone, Copy, Default)]
pub struct HellingerHalf;

impl MultiplierStrategy for HellingerHalf {
    fn multiplier(&self, situation: &[Outcome]) -> Gamble {
        hellinger_half(situation.len() as u64 + 1)
    }

    fn name(&self) -> String {
        "hellinger-half".into()
    }
}

/// Strategy form of [`hellinger_near_half`]: a supermartingale multiplier
/// for the near-half forecasting system.
#[derive(Debug, Clone, Copy, Default)]
pub struct HellingerNearHalf;

impl MultiplierStrategy for HellingerNearHalf {
    fn multiplier(&self, situation: &[Outcome]) -> Gamble {
        hellinger_near_half(situation.len() as u64 + 1)
    }

    fn name(&self) -> String {
        "hellinger-near-half".into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::expectation;
    use crate::rng::CounterRng;
    use crate::systems::ForecastingSystem;
    use crate::tree::{capital_from_multiplier, situations_to_depth, validate_multiplier};

    #[test]
    fn fair_coin_expectation_is_exactly_one() {
        for n in 1..=10_000u64 {
            let g = hellinger_half(n);
            assert!((expectation(0.5, g) - 1.0).abs() < 1e-12, "n = {n}");
            assert!(g.on_one != g.on_zero, "p_n never equals 1/2");
        }
    }

    #[test]
    fn near_half_expectation_is_exactly_one() {
        for n in 1..=10_000u64 {
            let g = hellinger_near_half(n);
            let p = near_half_probability(n).unwrap();
            assert!((expectation(p, g) - 1.0).abs() < 1e-12, "n = {n}");
            assert!(g.on_one > 0.0 && g.on_zero > 0.0);
        }
    }

    #[test]
    fn pointwise_product_is_exp_harmonic_term() {
        for n in 1..=10_000u64 {
            let g = hellinger_half(n);
            let h = hellinger_near_half(n);
            let expected = (1.0 / (n as f64 + 1.0)).exp();
            assert!((g.on_one * h.on_one - expected).abs() < 1e-12);
            assert!((g.on_zero * h.on_zero - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn joint_log_capital_is_the_harmonic_tail_on_any_path() {
        let rng = CounterRng::new(41);
        let n = 100_000usize;
        let path: Vec<Outcome> = (0..n)
            .map(|k| Outcome::from_bool(rng.unit(k as u64, 0) < 0.5))
            .collect();
        let half = capital_from_multiplier(&HellingerHalf, &path, n).unwrap();
        let near = capital_from_multiplier(&HellingerNearHalf, &path, n).unwrap();
        let mut harmonic = 0.0f64;
        for k in 1..=n {
            harmonic += 1.0 / (k as f64 + 1.0);
            if k % 9973 == 0 || k == n {
                let joint = half.log_at(k) + near.log_at(k);
                assert!((joint - harmonic).abs() < 1e-9, "k = {k}");
            }
        }
    }

    #[test]
    fn both_validate_against_their_declared_systems() {
        let situations = situations_to_depth(10).unwrap();
        let half_system = ForecastingSystem::precise(0.5).unwrap();
        assert!(validate_multiplier(&HellingerHalf, &half_system, &situations, 1e-12).is_valid());
        assert!(validate_multiplier(
            &HellingerNearHalf,
            &ForecastingSystem::near_half(),
            &situations,
            1e-12
        )
        .is_valid());
        // And the mismatched pairing genuinely fails validation.
        assert!(
            !validate_multiplier(&HellingerHalf, &ForecastingSystem::near_half(), &situations, 1e-12)
                .is_valid()
        );
    }
}
