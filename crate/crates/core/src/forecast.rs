//! Interval forecasts, gambles on a binary outcome, and the local lower and
//! upper expectation functionals they induce.
//!
//! An interval forecast `[l, u] ⊆ [0, 1]` commits a forecaster to `l` as a
//! supremum buying price and `u` as an infimum selling price for the next
//! outcome. The induced lower expectation of a gamble `f` on `{0, 1}` is
//!
//! ```text
//! E_lower(f) = min_{p in [l,u]} p·f(1) + (1-p)·f(0)
//! ```
//!
//! and the upper expectation is its conjugate `E_upper(f) = -E_lower(-f)`.
//! Both are linear in `p`, so the extremum is always attained at an endpoint
//! of the interval; we evaluate the two endpoints directly and never iterate.

use std::fmt;

use thiserror::Error;

/// A binary outcome: one coin flip, one bit of a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Zero,
    One,
}

impl Outcome {
    /// The outcome as a 0/1 integer.
    #[inline]
    pub fn bit(self) -> u8 {
        match self {
            Outcome::Zero => 0,
            Outcome::One => 1,
        }
    }

    /// The outcome as a 0.0/1.0 payoff.
    #[inline]
    pub fn indicator(self) -> f64 {
        self.bit() as f64
    }

    pub fn from_bit(bit: u8) -> Option<Outcome> {
        match bit {
            0 => Some(Outcome::Zero),
            1 => Some(Outcome::One),
            _ => None,
        }
    }

    #[inline]
    pub fn from_bool(one: bool) -> Outcome {
        if one {
            Outcome::One
        } else {
            Outcome::Zero
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

/// Error raised when parsing a bit stream.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid byte {byte:#04x} at offset {position}; expected '0', '1' or whitespace")]
pub struct ParseBitsError {
    pub byte: u8,
    pub position: usize,
}

/// Parse an ASCII bit stream. All whitespace is ignored; any byte other than
/// `0`, `1` or whitespace is a format error.
pub fn parse_bits(text: &str) -> Result<Vec<Outcome>, ParseBitsError> {
    let mut bits = Vec::with_capacity(text.len());
    for (position, byte) in text.bytes().enumerate() {
        match byte {
            b'0' => bits.push(Outcome::Zero),
            b'1' => bits.push(Outcome::One),
            b if b.is_ascii_whitespace() => {}
            byte => return Err(ParseBitsError { byte, position }),
        }
    }
    Ok(bits)
}

/// Render a bit sequence as an ASCII string of `0`/`1` characters.
pub fn format_bits(bits: &[Outcome]) -> String {
    bits.iter().map(|b| char::from(b'0' + b.bit())).collect()
}

/// A gamble on a binary outcome, identified with its payoff pair
/// `(f(1), f(0))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamble {
    /// Payoff when the outcome is 1.
    pub on_one: f64,
    /// Payoff when the outcome is 0.
    pub on_zero: f64,
}

impl Gamble {
    #[inline]
    pub fn new(on_one: f64, on_zero: f64) -> Gamble {
        Gamble { on_one, on_zero }
    }

    /// The constant gamble `f ≡ c`.
    #[inline]
    pub fn constant(c: f64) -> Gamble {
        Gamble::new(c, c)
    }

    /// The gamble `f(x) = x` that pays the outcome itself.
    #[inline]
    pub fn identity() -> Gamble {
        Gamble::new(1.0, 0.0)
    }

    #[inline]
    pub fn value_on(&self, outcome: Outcome) -> f64 {
        match outcome {
            Outcome::One => self.on_one,
            Outcome::Zero => self.on_zero,
        }
    }

    #[inline]
    pub fn min_value(&self) -> f64 {
        self.on_one.min(self.on_zero)
    }

    #[inline]
    pub fn max_value(&self) -> f64 {
        self.on_one.max(self.on_zero)
    }

    /// `max f - min f`, the variation norm of the gamble.
    #[inline]
    pub fn range(&self) -> f64 {
        self.max_value() - self.min_value()
    }

    #[inline]
    pub fn scaled(&self, factor: f64) -> Gamble {
        Gamble::new(self.on_one * factor, self.on_zero * factor)
    }

    #[inline]
    pub fn shifted(&self, offset: f64) -> Gamble {
        Gamble::new(self.on_one + offset, self.on_zero + offset)
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.on_one.is_finite() && self.on_zero.is_finite()
    }
}

impl std::ops::Neg for Gamble {
    type Output = Gamble;

    #[inline]
    fn neg(self) -> Gamble {
        Gamble::new(-self.on_one, -self.on_zero)
    }
}

impl std::ops::Add for Gamble {
    type Output = Gamble;

    #[inline]
    fn add(self, rhs: Gamble) -> Gamble {
        Gamble::new(self.on_one + rhs.on_one, self.on_zero + rhs.on_zero)
    }
}

/// Error raised by invalid forecast parameters.
#[derive(Debug, Error, PartialEq)]
pub enum ForecastError {
    #[error("invalid interval forecast [{lower}, {upper}]: need 0 <= lower <= upper <= 1")]
    InvalidInterval { lower: f64, upper: f64 },
}

/// A closed subinterval `[lower, upper]` of the unit interval: the
/// forecaster's commitment about the probability of the next outcome being 1.
///
/// A degenerate interval `lower == upper` is a precise forecast; there is no
/// separate type for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalForecast {
    lower: f64,
    upper: f64,
}

impl IntervalForecast {
    /// Build a validated interval forecast. Fails unless
    /// `0 <= lower <= upper <= 1` with both bounds finite.
    pub fn new(lower: f64, upper: f64) -> Result<IntervalForecast, ForecastError> {
        let valid = lower.is_finite()
            && upper.is_finite()
            && (0.0..=1.0).contains(&lower)
            && (0.0..=1.0).contains(&upper)
            && lower <= upper;
        if valid {
            Ok(IntervalForecast { lower, upper })
        } else {
            Err(ForecastError::InvalidInterval { lower, upper })
        }
    }

    /// The precise forecast `[p, p]`.
    pub fn precise(p: f64) -> Result<IntervalForecast, ForecastError> {
        IntervalForecast::new(p, p)
    }

    /// The vacuous forecast `[0, 1]` that commits the forecaster to nothing.
    #[inline]
    pub fn vacuous() -> IntervalForecast {
        IntervalForecast {
            lower: 0.0,
            upper: 1.0,
        }
    }

    /// Internal constructor for values already validated by the caller.
    #[inline]
    pub(crate) fn new_unchecked(lower: f64, upper: f64) -> IntervalForecast {
        debug_assert!((0.0..=1.0).contains(&lower) && lower <= upper && upper <= 1.0);
        IntervalForecast { lower, upper }
    }

    #[inline]
    pub fn lower(&self) -> f64 {
        self.lower
    }

    #[inline]
    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// The midpoint of the interval.
    #[inline]
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    #[inline]
    pub fn is_precise(&self) -> bool {
        self.lower == self.upper
    }

    /// Set inclusion `self ⊆ other`.
    #[inline]
    pub fn is_subset_of(&self, other: &IntervalForecast) -> bool {
        other.lower <= self.lower && self.upper <= other.upper
    }

    #[inline]
    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }

    /// Smallest interval containing both `self` and `other`.
    pub fn hull(&self, other: &IntervalForecast) -> IntervalForecast {
        IntervalForecast {
            lower: self.lower.min(other.lower),
            upper: self.upper.max(other.upper),
        }
    }

    /// The lower expectation of `f` under this interval forecast.
    #[inline]
    pub fn lower_expectation(&self, f: Gamble) -> f64 {
        debug_assert!(f.is_finite());
        expectation(self.lower, f).min(expectation(self.upper, f))
    }

    /// The upper expectation of `f`, defined by conjugacy as
    /// `-E_lower(-f)`; this shares the lower-expectation code path so the
    /// conjugacy identity holds bit-exactly.
    #[inline]
    pub fn upper_expectation(&self, f: Gamble) -> f64 {
        -self.lower_expectation(-f)
    }
}

impl fmt::Display for IntervalForecast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

/// The precise expectation `p·f(1) + (1-p)·f(0)`.
#[inline]
pub fn expectation(p: f64, f: Gamble) -> f64 {
    p * f.on_one + (1.0 - p) * f.on_zero
}

/// Free-function form of [`IntervalForecast::lower_expectation`].
#[inline]
pub fn lower_expectation(interval: IntervalForecast, f: Gamble) -> f64 {
    interval.lower_expectation(f)
}

/// Free-function form of [`IntervalForecast::upper_expectation`].
#[inline]
pub fn upper_expectation(interval: IntervalForecast, f: Gamble) -> f64 {
    interval.upper_expectation(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn interval(lower: f64, upper: f64) -> IntervalForecast {
        IntervalForecast::new(lower, upper).unwrap()
    }

    /// Independent oracle: minimize the precise expectation over a dense grid
    /// of probabilities inside the interval.
    fn grid_min_expectation(i: IntervalForecast, f: Gamble, points: usize) -> f64 {
        (0..=points)
            .map(|k| {
                let p = i.lower() + (i.upper() - i.lower()) * (k as f64) / (points as f64);
                expectation(p, f)
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn grid_max_expectation(i: IntervalForecast, f: Gamble, points: usize) -> f64 {
        (0..=points)
            .map(|k| {
                let p = i.lower() + (i.upper() - i.lower()) * (k as f64) / (points as f64);
                expectation(p, f)
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn lower_of_identity_is_lower_bound() {
        assert_eq!(interval(0.2, 0.6).lower_expectation(Gamble::identity()), 0.2);
        assert_eq!(interval(0.2, 0.6).upper_expectation(Gamble::identity()), 0.6);
    }

    #[test]
    fn vacuous_interval_attains_min_payoff() {
        let f = Gamble::new(3.0, -2.0);
        assert_eq!(IntervalForecast::vacuous().lower_expectation(f), -2.0);
    }

    #[test]
    fn constant_gamble_pinches_bounds() {
        for c in [-4.5, 0.0, 2.25] {
            let i = interval(0.1, 0.9);
            assert_eq!(i.lower_expectation(Gamble::constant(c)), c);
            assert_eq!(i.upper_expectation(Gamble::constant(c)), c);
        }
    }

    #[test]
    fn decreasing_gamble_matches_grid_oracle() {
        // Frozen from the dense-grid oracle: min/max of p*(-1) + (1-p)*3
        // over p in [0.25, 0.75].
        let i = interval(0.25, 0.75);
        let f = Gamble::new(-1.0, 3.0);
        assert!((i.lower_expectation(f) - 0.0).abs() < 1e-12);
        assert!((i.upper_expectation(f) - 2.0).abs() < 1e-12);
        assert!((grid_min_expectation(i, f, 1000) - 0.0).abs() < 1e-9);
        assert!((grid_max_expectation(i, f, 1000) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_intervals_are_rejected() {
        assert!(IntervalForecast::new(0.6, 0.4).is_err());
        assert!(IntervalForecast::new(-0.1, 0.5).is_err());
        assert!(IntervalForecast::new(0.5, 1.2).is_err());
        assert!(IntervalForecast::new(f64::NAN, 0.5).is_err());
        assert!(IntervalForecast::new(0.0, f64::INFINITY).is_err());
        // Degenerate intervals are fine: they are the precise forecasts.
        assert!(IntervalForecast::new(0.5, 0.5).is_ok());
    }

    #[test]
    fn bit_stream_round_trip_and_errors() {
        let bits = parse_bits("01 1\n0\t1").unwrap();
        assert_eq!(format_bits(&bits), "01101");
        let err = parse_bits("010x1").unwrap_err();
        assert_eq!(err, ParseBitsError { byte: b'x', position: 3 });
    }

    fn arb_interval() -> impl Strategy<Value = IntervalForecast> {
        (0.0f64..=1.0, 0.0f64..=1.0).prop_map(|(a, b)| {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            interval(lo, hi)
        })
    }

    fn arb_gamble() -> impl Strategy<Value = Gamble> {
        (-100.0f64..100.0, -100.0f64..100.0).prop_map(|(f1, f0)| Gamble::new(f1, f0))
    }

    proptest! {
        // C1: min f <= E_lower <= E_upper <= max f.
        #[test]
        fn coherence_bounds(i in arb_interval(), f in arb_gamble()) {
            let lo = i.lower_expectation(f);
            let hi = i.upper_expectation(f);
            prop_assert!(f.min_value() - 1e-12 <= lo);
            prop_assert!(lo <= hi + 1e-12);
            prop_assert!(hi <= f.max_value() + 1e-12);
        }

        // C2: non-negative homogeneity.
        #[test]
        fn coherence_homogeneity(i in arb_interval(), f in arb_gamble(), lambda in 0.0f64..50.0) {
            let direct = i.lower_expectation(f.scaled(lambda));
            let scaled = lambda * i.lower_expectation(f);
            let tol = 1e-12 * (1.0 + direct.abs().max(scaled.abs()));
            prop_assert!((direct - scaled).abs() <= tol);
        }

        // C3: superadditivity of the lower, subadditivity of the upper.
        #[test]
        fn coherence_additivity(i in arb_interval(), f in arb_gamble(), g in arb_gamble()) {
            prop_assert!(i.lower_expectation(f + g) >= i.lower_expectation(f) + i.lower_expectation(g) - 1e-12);
            prop_assert!(i.upper_expectation(f + g) <= i.upper_expectation(f) + i.upper_expectation(g) + 1e-12);
        }

        // C4: constant additivity.
        #[test]
        fn coherence_constant_additivity(i in arb_interval(), f in arb_gamble(), mu in -50.0f64..50.0) {
            let direct = i.lower_expectation(f.shifted(mu));
            let shifted = i.lower_expectation(f) + mu;
            prop_assert!((direct - shifted).abs() <= 1e-12 * (1.0 + direct.abs()));
        }

        // Conjugacy is bit-exact because it is the definition of the upper.
        #[test]
        fn conjugacy_bit_exact(i in arb_interval(), f in arb_gamble()) {
            prop_assert_eq!(i.upper_expectation(f), -i.lower_expectation(-f));
        }

        // Endpoint evaluation agrees with a 1001-point grid search.
        #[test]
        fn endpoint_sufficiency(i in arb_interval(), f in arb_gamble()) {
            prop_assert!((i.lower_expectation(f) - grid_min_expectation(i, f, 1000)).abs() < 1e-9);
            prop_assert!((i.upper_expectation(f) - grid_max_expectation(i, f, 1000)).abs() < 1e-9);
        }
    }
}
