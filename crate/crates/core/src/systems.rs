//! Forecasting systems: total maps from situations to interval forecasts,
//! with the named instances used throughout the library.
//!
//! Indexing convention: the forecast consumed at step `k` (the one producing
//! outcome `x_k`, 1-based) is the forecast of the conditioning situation
//! `(x_1, ..., x_{k-1})` of length `k - 1`. The alternating system reads the
//! parity of that conditioning length, and the near-half system forecasts
//! `x_n` with `p_n = 1/2 + (-1)^n δ_n` where
//! `δ_n = e^{-1/(n+1)} sqrt(e^{1/(n+1)} - 1)`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forecast::{ForecastError, IntervalForecast, Outcome};
use crate::tree::{Situation, TreeError, MAX_TREE_DEPTH};

#[derive(Debug, Error, PartialEq)]
pub enum SystemError {
    #[error(transparent)]
    Forecast(#[from] ForecastError),
    #[error("alternating system needs 0 <= p <= q <= 1, got p={p}, q={q}")]
    InvalidAlternating { p: f64, q: f64 },
    #[error("step index must be >= 1")]
    StepIndexZero,
    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("a depth-periodic system needs at least one interval")]
    EmptyPeriod,
    #[error("invalid situation key '{key}': {reason}")]
    InvalidSituationKey { key: String, reason: String },
}

/// `δ_n = e^{-1/(n+1)} sqrt(e^{1/(n+1)} - 1)`: the gap between the n-th
/// near-half forecast and 1/2. Lies in (0, 1/2) and decreases to 0.
pub fn near_half_delta(n: u64) -> Result<f64, SystemError> {
    if n == 0 {
        return Err(SystemError::StepIndexZero);
    }
    let t = 1.0 / (n as f64 + 1.0);
    // exp_m1 keeps full precision once e^t - 1 gets tiny.
    Ok((-t).exp() * t.exp_m1().sqrt())
}

/// `p_n = 1/2 + (-1)^n δ_n`: below 1/2 at odd steps, above at even steps.
pub fn near_half_probability(n: u64) -> Result<f64, SystemError> {
    let delta = near_half_delta(n)?;
    Ok(if n.is_multiple_of(2) { 0.5 + delta } else { 0.5 - delta })
}

/// Smallest step index `n` with `δ_n <= alpha`, by the closed-form ceiling
/// expression `⌈-1/ln((1 + sqrt(1 - 4α²))/2) - 1⌉`.
pub fn near_half_entry_step(alpha: f64) -> Result<u64, SystemError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SystemError::InvalidAlpha(alpha));
    }
    if alpha >= near_half_delta(1)? {
        return Ok(1);
    }
    let root = (1.0 - 4.0 * alpha * alpha).sqrt();
    let n = (-1.0 / ((1.0 + root) / 2.0).ln() - 1.0).ceil();
    Ok(n as u64)
}

/// A total map from situations to interval forecasts.
#[derive(Debug, Clone, PartialEq)]
pub enum ForecastingSystem {
    /// The same interval in every situation.
    Stationary(IntervalForecast),
    /// `[0, 1]` everywhere; makes every sequence random.
    Vacuous,
    /// Precise `p` when the conditioning situation has odd length, `q` when
    /// it has even length.
    AlternatingPQ { p: f64, q: f64 },
    /// Precise `p_n` for the n-th outcome: non-stationary forecasts
    /// converging to the fair coin from alternating sides.
    NearHalf,
    /// Explicit per-situation table with a default for unlisted situations.
    Table {
        entries: HashMap<Situation, IntervalForecast>,
        default: IntervalForecast,
    },
    /// Cycles through a list of intervals by situation depth.
    DepthPeriodic(Vec<IntervalForecast>),
}

impl ForecastingSystem {
    pub fn stationary(interval: IntervalForecast) -> ForecastingSystem {
        ForecastingSystem::Stationary(interval)
    }

    pub fn vacuous() -> ForecastingSystem {
        ForecastingSystem::Vacuous
    }

    pub fn precise(p: f64) -> Result<ForecastingSystem, SystemError> {
        Ok(ForecastingSystem::Stationary(IntervalForecast::precise(p)?))
    }

    pub fn alternating_pq(p: f64, q: f64) -> Result<ForecastingSystem, SystemError> {
        let valid = p.is_finite() && q.is_finite() && 0.0 <= p && p <= q && q <= 1.0;
        if valid {
            Ok(ForecastingSystem::AlternatingPQ { p, q })
        } else {
            Err(SystemError::InvalidAlternating { p, q })
        }
    }

    pub fn near_half() -> ForecastingSystem {
        ForecastingSystem::NearHalf
    }

    pub fn table(
        entries: HashMap<Situation, IntervalForecast>,
        default: IntervalForecast,
    ) -> ForecastingSystem {
        ForecastingSystem::Table { entries, default }
    }

    pub fn depth_periodic(
        intervals: Vec<IntervalForecast>,
    ) -> Result<ForecastingSystem, SystemError> {
        if intervals.is_empty() {
            return Err(SystemError::EmptyPeriod);
        }
        Ok(ForecastingSystem::DepthPeriodic(intervals))
    }

    /// The interval forecast this system assigns to a situation.
    pub fn forecast(&self, situation: &[Outcome]) -> IntervalForecast {
        match self {
            ForecastingSystem::Stationary(interval) => *interval,
            ForecastingSystem::Vacuous => IntervalForecast::vacuous(),
            ForecastingSystem::AlternatingPQ { p, q } => {
                if !situation.len().is_multiple_of(2) {
                    IntervalForecast::new_unchecked(*p, *p)
                } else {
                    IntervalForecast::new_unchecked(*q, *q)
                }
            }
            ForecastingSystem::NearHalf => {
                let n = situation.len() as u64 + 1;
                let p = near_half_probability(n).expect("step index >= 1");
                IntervalForecast::new_unchecked(p, p)
            }
            ForecastingSystem::Table { entries, default } => {
                entries.get(situation).copied().unwrap_or(*default)
            }
            ForecastingSystem::DepthPeriodic(intervals) => {
                intervals[situation.len() % intervals.len()]
            }
        }
    }

    /// True iff `self(s) ⊆ other(s)` for every situation of length `< depth`:
    /// `self` is the more committal system.
    pub fn refines(&self, other: &ForecastingSystem, depth: usize) -> Result<bool, TreeError> {
        if depth > MAX_TREE_DEPTH {
            return Err(TreeError::DepthGuard {
                depth,
                max: MAX_TREE_DEPTH,
            });
        }
        for len in 0..depth {
            for index in 0..(1usize << len) {
                let s = Situation::from_index(index, len);
                if !self
                    .forecast(s.as_slice())
                    .is_subset_of(&other.forecast(s.as_slice()))
                {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The smallest single interval containing every forecast this system
    /// can emit; the stationary system on this hull is refined by `self`.
    pub fn stationary_envelope(&self) -> IntervalForecast {
        match self {
            ForecastingSystem::Stationary(interval) => *interval,
            ForecastingSystem::Vacuous => IntervalForecast::vacuous(),
            ForecastingSystem::AlternatingPQ { p, q } => IntervalForecast::new_unchecked(*p, *q),
            ForecastingSystem::NearHalf => {
                // Odd-step forecasts increase from p_1 toward 1/2, even-step
                // ones decrease from p_2, so the hull is [p_1, p_2].
                IntervalForecast::new_unchecked(
                    near_half_probability(1).expect("n = 1"),
                    near_half_probability(2).expect("n = 2"),
                )
            }
            ForecastingSystem::Table { entries, default } => entries
                .values()
                .fold(*default, |hull, interval| hull.hull(interval)),
            ForecastingSystem::DepthPeriodic(intervals) => intervals[1..]
                .iter()
                .fold(intervals[0], |hull, interval| hull.hull(interval)),
        }
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        match self {
            ForecastingSystem::Stationary(i) => format!("stationary({i})"),
            ForecastingSystem::Vacuous => "vacuous".into(),
            ForecastingSystem::AlternatingPQ { p, q } => format!("alternating-pq(p={p}, q={q})"),
            ForecastingSystem::NearHalf => "near-half".into(),
            ForecastingSystem::Table { entries, .. } => format!("table({} entries)", entries.len()),
            ForecastingSystem::DepthPeriodic(intervals) => {
                format!("depth-periodic(period={})", intervals.len())
            }
        }
    }
}

// Serialization mirror: a tagged JSON document such as
// {"variant": "stationary", "lower": 0.4, "upper": 0.6}. Table entries are
// keyed by bit strings like "0110" (empty string = root).

#[derive(Serialize, Deserialize)]
struct RawInterval {
    lower: f64,
    upper: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "kebab-case", deny_unknown_fields)]
enum RawSystem {
    Stationary {
        lower: f64,
        upper: f64,
    },
    Vacuous,
    AlternatingPq {
        p: f64,
        q: f64,
    },
    NearHalf,
    Table {
        default: RawInterval,
        entries: std::collections::BTreeMap<String, RawInterval>,
    },
    DepthPeriodic {
        intervals: Vec<RawInterval>,
    },
}

impl TryFrom<RawSystem> for ForecastingSystem {
    type Error = SystemError;

    fn try_from(raw: RawSystem) -> Result<ForecastingSystem, SystemError> {
        match raw {
            RawSystem::Stationary { lower, upper } => Ok(ForecastingSystem::Stationary(
                IntervalForecast::new(lower, upper)?,
            )),
            RawSystem::Vacuous => Ok(ForecastingSystem::Vacuous),
            RawSystem::AlternatingPq { p, q } => ForecastingSystem::alternating_pq(p, q),
            RawSystem::NearHalf => Ok(ForecastingSystem::NearHalf),
            RawSystem::Table { default, entries } => {
                let default = IntervalForecast::new(default.lower, default.upper)?;
                let mut map = HashMap::with_capacity(entries.len());
                for (key, raw_interval) in entries {
                    let situation =
                        Situation::parse(&key).map_err(|e| SystemError::InvalidSituationKey {
                            key: key.clone(),
                            reason: e.to_string(),
                        })?;
                    map.insert(
                        situation,
                        IntervalForecast::new(raw_interval.lower, raw_interval.upper)?,
                    );
                }
                Ok(ForecastingSystem::Table {
                    entries: map,
                    default,
                })
            }
            RawSystem::DepthPeriodic { intervals } => {
                let parsed = intervals
                    .into_iter()
                    .map(|r| IntervalForecast::new(r.lower, r.upper))
                    .collect::<Result<Vec<_>, _>>()?;
                ForecastingSystem::depth_periodic(parsed)
            }
        }
    }
}

impl From<&ForecastingSystem> for RawSystem {
    fn from(system: &ForecastingSystem) -> RawSystem {
        match system {
            ForecastingSystem::Stationary(i) => RawSystem::Stationary {
                lower: i.lower(),
                upper: i.upper(),
            },
            ForecastingSystem::Vacuous => RawSystem::Vacuous,
            ForecastingSystem::AlternatingPQ { p, q } => RawSystem::AlternatingPq { p: *p, q: *q },
            ForecastingSystem::NearHalf => RawSystem::NearHalf,
            ForecastingSystem::Table { entries, default } => RawSystem::Table {
                default: RawInterval {
                    lower: default.lower(),
                    upper: default.upper(),
                },
                entries: entries
                    .iter()
                    .map(|(s, i)| {
                        (
                            s.to_string(),
                            RawInterval {
                                lower: i.lower(),
                                upper: i.upper(),
                            },
                        )
                    })
                    .collect(),
            },
            ForecastingSystem::DepthPeriodic(intervals) => RawSystem::DepthPeriodic {
                intervals: intervals
                    .iter()
                    .map(|i| RawInterval {
                        lower: i.lower(),
                        upper: i.upper(),
                    })
                    .collect(),
            },
        }
    }
}

impl Serialize for ForecastingSystem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawSystem::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ForecastingSystem {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> Result<ForecastingSystem, D::Error> {
        let raw = RawSystem::deserialize(deserializer)?;
        ForecastingSystem::try_from(raw).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::parse_bits;

    #[test]
    fn vacuous_forecasts_everywhere() {
        let system = ForecastingSystem::vacuous();
        for text in ["", "0", "10110"] {
            let s = parse_bits(text).unwrap();
            assert_eq!(system.forecast(&s), IntervalForecast::vacuous());
        }
    }

    #[test]
    fn alternating_reads_conditioning_length_parity() {
        let system = ForecastingSystem::alternating_pq(0.0, 1.0).unwrap();
        // Root has even length 0, so the first outcome is forecast with q.
        assert_eq!(system.forecast(&[]), IntervalForecast::precise(1.0).unwrap());
        let one = parse_bits("1").unwrap();
        assert_eq!(system.forecast(&one), IntervalForecast::precise(0.0).unwrap());
        let two = parse_bits("10").unwrap();
        assert_eq!(system.forecast(&two), IntervalForecast::precise(1.0).unwrap());
    }

    #[test]
    fn alternating_validates_ordering() {
        assert!(ForecastingSystem::alternating_pq(0.7, 0.3).is_err());
        assert!(ForecastingSystem::alternating_pq(-0.1, 0.5).is_err());
        assert!(ForecastingSystem::alternating_pq(0.3, 0.3).is_ok());
    }

    #[test]
    fn near_half_first_forecast_sits_below_half() {
        let system = ForecastingSystem::near_half();
        let first = system.forecast(&[]);
        assert!(first.is_precise());
        let expected = 0.5 - near_half_delta(1).unwrap();
        assert!((first.lower() - expected).abs() < 1e-15);
        // Frozen from independent evaluation of the closed form (and
        // cross-checked against delta^2 = e^{-1/(n+1)} - e^{-2/(n+1)}).
        assert!((near_half_delta(1).unwrap() - 0.4885195).abs() < 1e-6);
    }

    #[test]
    fn delta_squared_identity_cross_check() {
        // delta_n^2 = e^{-1/(n+1)} - e^{-2/(n+1)}, an independent route to
        // the same quantity.
        for n in 1..=1000u64 {
            let t = 1.0 / (n as f64 + 1.0);
            let via_square = ((-t).exp() - (-2.0 * t).exp()).sqrt();
            assert!((near_half_delta(n).unwrap() - via_square).abs() < 1e-14);
        }
    }

    #[test]
    fn delta_is_decreasing_and_bounded() {
        let mut prev = f64::INFINITY;
        for n in 1..=100_000u64 {
            let d = near_half_delta(n).unwrap();
            assert!(d > 0.0 && d < 0.5, "delta_{n} = {d}");
            assert!(d < prev, "delta must decrease at n = {n}");
            prev = d;
        }
        assert!(matches!(near_half_delta(0), Err(SystemError::StepIndexZero)));
    }

    #[test]
    fn probability_product_identity() {
        // p_n (1 - p_n) = 1/4 - delta_n^2.
        for n in 1..=10_000u64 {
            let p = near_half_probability(n).unwrap();
            let d = near_half_delta(n).unwrap();
            assert!((p * (1.0 - p) - (0.25 - d * d)).abs() < 1e-12);
        }
    }

    #[test]
    fn hellinger_normalization_identity() {
        // e^{1/(2(n+1))} (sqrt(p_n) + sqrt(1 - p_n)) / sqrt(2) = 1.
        for n in 1..=10_000u64 {
            let p = near_half_probability(n).unwrap();
            let lhs = (0.5 / (n as f64 + 1.0)).exp() * (p.sqrt() + (1.0 - p).sqrt())
                / std::f64::consts::SQRT_2;
            assert!((lhs - 1.0).abs() < 1e-12, "n = {n}: {lhs}");
        }
    }

    #[test]
    fn entry_step_matches_scan() {
        for alpha in [0.45, 0.3, 0.1, 0.05, 0.01] {
            let formula = near_half_entry_step(alpha).unwrap();
            let scan = (1..).find(|&n| near_half_delta(n).unwrap() <= alpha).unwrap();
            assert_eq!(formula, scan, "alpha = {alpha}");
        }
        assert!(near_half_entry_step(0.0).is_err());
        assert!(near_half_entry_step(1.5).is_err());
    }

    #[test]
    fn near_half_approach_threshold() {
        // First step where the forecast is within 1e-2 of 1/2, found by
        // evaluation; the closed form must agree with a literal scan.
        let threshold = near_half_entry_step(0.01).unwrap();
        assert!(near_half_delta(threshold).unwrap() <= 0.01);
        assert!(near_half_delta(threshold - 1).unwrap() > 0.01);
    }

    #[test]
    fn refinement_examples() {
        let vacuous = ForecastingSystem::vacuous();
        let tight = ForecastingSystem::stationary(IntervalForecast::new(0.4, 0.6).unwrap());
        let loose = ForecastingSystem::stationary(IntervalForecast::new(0.3, 0.7).unwrap());
        let alternating = ForecastingSystem::alternating_pq(0.3, 0.7).unwrap();

        assert!(tight.refines(&vacuous, 6).unwrap());
        assert!(alternating.refines(&vacuous, 6).unwrap());
        assert!(tight.refines(&loose, 6).unwrap());
        assert!(!loose.refines(&tight, 6).unwrap());
        assert!(!alternating.refines(&tight, 6).unwrap());
        assert!(alternating.refines(&loose, 6).unwrap());
        assert!(matches!(
            tight.refines(&vacuous, 40),
            Err(TreeError::DepthGuard { .. })
        ));
    }

    #[test]
    fn table_lookup_is_total() {
        let mut entries = HashMap::new();
        entries.insert(
            Situation::parse("01").unwrap(),
            IntervalForecast::new(0.1, 0.2).unwrap(),
        );
        let system =
            ForecastingSystem::table(entries, IntervalForecast::new(0.45, 0.55).unwrap());
        let hit = parse_bits("01").unwrap();
        let miss = parse_bits("111").unwrap();
        assert_eq!(system.forecast(&hit), IntervalForecast::new(0.1, 0.2).unwrap());
        assert_eq!(system.forecast(&miss), IntervalForecast::new(0.45, 0.55).unwrap());
        assert_eq!(
            system.stationary_envelope(),
            IntervalForecast::new(0.1, 0.55).unwrap()
        );
    }

    #[test]
    fn depth_periodic_cycles() {
        let a = IntervalForecast::new(0.1, 0.2).unwrap();
        let b = IntervalForecast::new(0.8, 0.9).unwrap();
        let system = ForecastingSystem::depth_periodic(vec![a, b]).unwrap();
        assert_eq!(system.forecast(&[]), a);
        assert_eq!(system.forecast(&parse_bits("1").unwrap()), b);
        assert_eq!(system.forecast(&parse_bits("10").unwrap()), a);
        assert!(ForecastingSystem::depth_periodic(vec![]).is_err());
    }

    #[test]
    fn envelope_per_variant() {
        assert_eq!(
            ForecastingSystem::alternating_pq(0.3, 0.7)
                .unwrap()
                .stationary_envelope(),
            IntervalForecast::new(0.3, 0.7).unwrap()
        );
        let env = ForecastingSystem::near_half().stationary_envelope();
        assert!((env.lower() - near_half_probability(1).unwrap()).abs() < 1e-15);
        assert!((env.upper() - near_half_probability(2).unwrap()).abs() < 1e-15);
        // The hull really does contain every forecast along a few paths.
        let system = ForecastingSystem::near_half();
        let path = parse_bits("110100101101001010010101").unwrap();
        for k in 0..path.len() {
            assert!(system.forecast(&path[..k]).is_subset_of(&env));
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let system = ForecastingSystem::stationary(IntervalForecast::new(0.25, 0.75).unwrap());
        let json = serde_json::to_string(&system).unwrap();
        assert!(json.contains("\"variant\":\"stationary\""));
        let back: ForecastingSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(system, back);

        let table_json = r#"{
            "variant": "table",
            "default": {"lower": 0.0, "upper": 1.0},
            "entries": {"0110": {"lower": 0.2, "upper": 0.8}, "": {"lower": 0.5, "upper": 0.5}}
        }"#;
        let table: ForecastingSystem = serde_json::from_str(table_json).unwrap();
        assert_eq!(
            table.forecast(&parse_bits("0110").unwrap()),
            IntervalForecast::new(0.2, 0.8).unwrap()
        );
        assert_eq!(table.forecast(&[]), IntervalForecast::precise(0.5).unwrap());

        let bad = r#"{"variant": "stationary", "lower": 0.8, "upper": 0.2}"#;
        assert!(serde_json::from_str::<ForecastingSystem>(bad).is_err());
        let bad_key = r#"{"variant": "table", "default": {"lower": 0, "upper": 1}, "entries": {"01x": {"lower": 0, "upper": 1}}}"#;
        assert!(serde_json::from_str::<ForecastingSystem>(bad_key).is_err());
    }
}
