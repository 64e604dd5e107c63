//! Shared helpers for unit tests: deterministic random strategies, paths
//! and situations. Compiled only for tests.

use crate::forecast::{Gamble, IntervalForecast, Outcome};
use crate::rng::CounterRng;
use crate::tree::{bits_to_index, MultiplierStrategy};

/// Per-situation multiplier drawn deterministically from the situation and
/// rescaled so its upper expectation under `interval` stays at most 1. After
/// rescaling at most one of the two values can exceed 1, exactly as for any
/// genuine supermartingale multiplier.
#[derive(Clone)]
pub(crate) struct RandomValidMultiplier {
    pub rng: CounterRng,
    pub interval: IntervalForecast,
}

impl MultiplierStrategy for RandomValidMultiplier {
    fn multiplier(&self, situation: &[Outcome]) -> Gamble {
        let counter = ((bits_to_index(situation) as u64) << 6) | situation.len() as u64;
        let raw = Gamble::new(
            2.0 * self.rng.unit(counter, 10),
            2.0 * self.rng.unit(counter, 11),
        );
        let upper = self.interval.upper_expectation(raw);
        if upper <= 1.0 {
            raw
        } else {
            raw.scaled((1.0 - 1e-9) / upper)
        }
    }

    fn name(&self) -> String {
        format!("random-valid({})", self.interval)
    }
}
