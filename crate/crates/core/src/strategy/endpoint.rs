//! Constant bets against one endpoint of a stationary interval forecast:
//! the workhorse of the interval sweep.
//!
//! The high-direction bet with size `lam` against `[l, u]` plays the gamble
//! `(1 + lam(1 - u), 1 - lam·u)`, whose precise expectation is
//! `1 + lam(p - u) <= 1` for every `p <= u`: it is a supermartingale
//! multiplier for the stationary system on the interval, and its capital
//! grows when the empirical frequency of ones exceeds `u`. The low direction
//! is the mirror image around `l`.
//!
//! For a fixed direction and bet size the per-step factors are pointwise
//! antitone in the interval: enlarging `u` (direction high) or shrinking `l`
//! (direction low) can only shrink the capital. The sweep relies on this to
//! make its surviving set exactly upward closed.

use std::fmt;

use crate::forecast::{Gamble, IntervalForecast, Outcome};
use crate::strategy::StrategyError;
use crate::tree::MultiplierStrategy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BetDirection {
    /// Grows when the selected frequency of ones exceeds the upper bound.
    High,
    /// Grows when it falls below the lower bound.
    Low,
}

impl fmt::Display for BetDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetDirection::High => write!(f, "high"),
            BetDirection::Low => write!(f, "low"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EndpointBet {
    gamble: Gamble,
    interval: IntervalForecast,
    bet_size: f64,
    direction: BetDirection,
}

impl EndpointBet {
    pub fn new(
        interval: IntervalForecast,
        bet_size: f64,
        direction: BetDirection,
    ) -> Result<EndpointBet, StrategyError> {
        if !(bet_size > 0.0 && bet_size <= 1.0) {
            return Err(StrategyError::InvalidBetSize(bet_size));
        }
        let gamble = match direction {
            BetDirection::High => Gamble::new(
                1.0 + bet_size * (1.0 - interval.upper()),
                1.0 - bet_size * interval.upper(),
            ),
            BetDirection::Low => Gamble::new(
                1.0 - bet_size * (1.0 - interval.lower()),
                1.0 + bet_size * interval.lower(),
            ),
        };
        Ok(EndpointBet {
            gamble,
            interval,
            bet_size,
            direction,
        })
    }
}

impl MultiplierStrategy for EndpointBet {
    fn multiplier(&self, _situation: &[Outcome]) -> Gamble {
        self.gamble
    }

    fn name(&self) -> String {
        format!(
            "endpoint-bet({}, lam={}, I={})",
            self.direction, self.bet_size, self.interval
        )
    }
}
