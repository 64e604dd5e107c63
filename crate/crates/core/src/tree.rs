//! The binary event tree: situations, capital processes, supermartingale
//! validation, and finite-horizon expectations by backward induction.
//!
//! A situation is a finite bit string, a node of the unbounded binary tree
//! whose paths are infinite outcome sequences. A multiplier strategy maps
//! each situation to a non-negative gamble `M(s)`; its running product is the
//! Sceptic's capital `T(□) = 1`, `T(sx) = T(s)·M(s)(x)`. The capital
//! difference satisfies `ΔT(s) = T(s)·[M(s) - 1]`, so whenever the upper
//! expectation of `M(s)` stays at or below 1 in every situation, `T` is a
//! test supermartingale.
//!
//! Capital is tracked in log domain with a `-inf` sentinel for exact zero:
//! products over 1e6 steps overflow and underflow doubles long before they
//! stop being informative.

use std::borrow::Borrow;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::forecast::{Gamble, Outcome};
use crate::systems::ForecastingSystem;

/// Depth guard for operations that materialize a complete binary tree.
pub const MAX_TREE_DEPTH: usize = 20;

/// Default tolerance for multiplier and supermartingale validation.
/// Strategies constructed analytically should pass far tighter checks (the
/// tests use 1e-12); this default separates float noise from genuine
/// contract violations on long runs.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;

/// A finite outcome sequence; the empty situation is the root of the tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Situation(Vec<Outcome>);

impl Situation {
    pub fn root() -> Situation {
        Situation(Vec::new())
    }

    pub fn from_bits(bits: impl Into<Vec<Outcome>>) -> Situation {
        Situation(bits.into())
    }

    /// Parse a bit string such as `"0110"`; the empty string is the root.
    pub fn parse(text: &str) -> Result<Situation, crate::forecast::ParseBitsError> {
        crate::forecast::parse_bits(text).map(Situation)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Outcome] {
        &self.0
    }

    pub fn child(&self, outcome: Outcome) -> Situation {
        let mut bits = self.0.clone();
        bits.push(outcome);
        Situation(bits)
    }

    /// True iff `self` precedes `other`: every path through `other` passes
    /// through `self`.
    pub fn precedes(&self, other: &Situation) -> bool {
        other.0.starts_with(&self.0)
    }

    /// The situation of length `len` whose bits spell `index` in binary,
    /// most significant bit first.
    pub fn from_index(index: usize, len: usize) -> Situation {
        let bits = (0..len)
            .map(|j| Outcome::from_bool((index >> (len - 1 - j)) & 1 == 1))
            .collect();
        Situation(bits)
    }

    /// Inverse of [`Situation::from_index`] for this situation's length.
    pub fn index(&self) -> usize {
        bits_to_index(&self.0)
    }
}

pub(crate) fn bits_to_index(bits: &[Outcome]) -> usize {
    bits.iter().fold(0usize, |acc, b| (acc << 1) | b.bit() as usize)
}

impl Borrow<[Outcome]> for Situation {
    fn borrow(&self) -> &[Outcome] {
        &self.0
    }
}

impl From<&[Outcome]> for Situation {
    fn from(bits: &[Outcome]) -> Situation {
        Situation(bits.to_vec())
    }
}

impl fmt::Display for Situation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::forecast::format_bits(&self.0))
    }
}

impl Serialize for Situation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("multiplier value {value} at situation '{situation}' is negative")]
    NegativeMultiplier { situation: Situation, value: f64 },
    #[error("horizon {horizon} exceeds path length {path_len}")]
    HorizonExceedsPath { horizon: usize, path_len: usize },
    #[error("threshold must exceed 1, got {0}")]
    InvalidThreshold(f64),
    #[error("depth {depth} exceeds the tree-size guard {max}")]
    DepthGuard { depth: usize, max: usize },
    #[error("value table for depth {depth} needs {expected} entries, got {got}")]
    IncompleteTable {
        depth: usize,
        expected: usize,
        got: usize,
    },
    #[error("log-capital sequence must start at 0, contain no NaN, and keep -inf sticky")]
    MalformedTrajectory,
}

/// A capital path in log domain. Entry `k` is `log T(ω^k)`; entry 0 is
/// `log T(□) = 0`. Exact zero capital is the sentinel `-inf`, and once
/// capital hits zero it stays there.
#[derive(Debug, Clone, PartialEq)]
pub struct CapitalTrajectory {
    log_values: Vec<f64>,
}

impl CapitalTrajectory {
    /// Wrap raw log-capital values, validating the trajectory invariants.
    pub fn from_log_values(log_values: Vec<f64>) -> Result<CapitalTrajectory, TreeError> {
        let starts_at_one = log_values.first() == Some(&0.0);
        let no_nan = log_values.iter().all(|v| !v.is_nan());
        let sticky = log_values
            .windows(2)
            .all(|w| w[0] != f64::NEG_INFINITY || w[1] == f64::NEG_INFINITY);
        if starts_at_one && no_nan && sticky {
            Ok(CapitalTrajectory { log_values })
        } else {
            Err(TreeError::MalformedTrajectory)
        }
    }

    /// Number of steps taken (the trajectory holds `steps + 1` values).
    pub fn steps(&self) -> usize {
        self.log_values.len() - 1
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn log_at(&self, step: usize) -> f64 {
        self.log_values[step]
    }

    /// Capital on the linear scale, exponentiating on demand.
    pub fn value_at(&self, step: usize) -> f64 {
        self.log_values[step].exp()
    }

    pub fn final_log(&self) -> f64 {
        *self.log_values.last().expect("trajectory is never empty")
    }

    /// The running maximum and the first step attaining it.
    pub fn max_log(&self) -> (f64, usize) {
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (k, &v) in self.log_values.iter().enumerate() {
            if v > best {
                best = v;
                arg = k;
            }
        }
        (best, arg)
    }
}

/// A multiplier process: a per-situation non-negative gamble whose running
/// product is the Sceptic's capital.
pub trait MultiplierStrategy: Send + Sync {
    /// The multiplier gamble `M(s)` played at situation `s`.
    fn multiplier(&self, situation: &[Outcome]) -> Gamble;

    /// Human-readable label, including parameters, used in reports.
    fn name(&self) -> String;
}

impl<T: MultiplierStrategy + ?Sized> MultiplierStrategy for &T {
    fn multiplier(&self, situation: &[Outcome]) -> Gamble {
        (**self).multiplier(situation)
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

impl<T: MultiplierStrategy + ?Sized> MultiplierStrategy for std::sync::Arc<T> {
    fn multiplier(&self, situation: &[Outcome]) -> Gamble {
        (**self).multiplier(situation)
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

/// A multiplier with a fixed gamble in every situation.
#[derive(Debug, Clone, Copy)]
pub struct ConstantMultiplier(pub Gamble);

impl MultiplierStrategy for ConstantMultiplier {
    fn multiplier(&self, _situation: &[Outcome]) -> Gamble {
        self.0
    }
    fn name(&self) -> String {
        format!("constant({}, {})", self.0.on_one, self.0.on_zero)
    }
}

/// Anything that produces a capital trajectory along a path: multiplier
/// strategies directly, and the mixture constructions built on top of them.
pub trait CapitalProcess: Send + Sync {
    /// Log-capital trajectory along the first `horizon` outcomes of `path`.
    fn log_trajectory(
        &self,
        path: &[Outcome],
        horizon: usize,
    ) -> Result<CapitalTrajectory, TreeError>;

    fn name(&self) -> String;
}

impl<T: MultiplierStrategy> CapitalProcess for T {
    fn log_trajectory(
        &self,
        path: &[Outcome],
        horizon: usize,
    ) -> Result<CapitalTrajectory, TreeError> {
        capital_from_multiplier(self, path, horizon)
    }

    fn name(&self) -> String {
        MultiplierStrategy::name(self)
    }
}

/// Run the capital recursion `T(sx) = T(s)·M(s)(x)` along a path, in log
/// domain. Fails if the strategy ever emits a negative multiplier value.
pub fn capital_from_multiplier<D: MultiplierStrategy + ?Sized>(
    strategy: &D,
    path: &[Outcome],
    horizon: usize,
) -> Result<CapitalTrajectory, TreeError> {
    if horizon > path.len() {
        return Err(TreeError::HorizonExceedsPath {
            horizon,
            path_len: path.len(),
        });
    }
    let mut log_values = Vec::with_capacity(horizon + 1);
    let mut log_capital = 0.0f64;
    log_values.push(log_capital);
    for k in 0..horizon {
        let situation = &path[..k];
        let m = strategy.multiplier(situation);
        if m.on_one < 0.0 || m.on_zero < 0.0 {
            let value = m.min_value();
            return Err(TreeError::NegativeMultiplier {
                situation: Situation::from(situation),
                value,
            });
        }
        let factor = m.value_on(path[k]);
        // ln(0) = -inf is the exact-zero sentinel and is absorbing.
        log_capital += factor.ln();
        log_values.push(log_capital);
    }
    Ok(CapitalTrajectory { log_values })
}

/// One failed supermartingale-multiplier check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplierViolation {
    pub situation: Situation,
    /// `E_upper(M(s)) - 1`.
    pub excess: f64,
}

/// Result of checking the supermartingale-multiplier condition
/// `E_upper(M(s)) <= 1` over a set of situations. Violations are data, not
/// errors.
#[derive(Debug, Clone, Default, Serialize)]
pub struct MultiplierValidation {
    pub checked: usize,
    pub violations: Vec<MultiplierViolation>,
    /// Situations where the multiplier emitted a negative value, breaking
    /// the strategy contract outright.
    pub negative_values: Vec<Situation>,
}

impl MultiplierValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty() && self.negative_values.is_empty()
    }
}

/// Check `E_upper(Γ(s), M(s)) <= 1 + tol` for every given situation.
pub fn validate_multiplier<D: MultiplierStrategy + ?Sized>(
    strategy: &D,
    system: &ForecastingSystem,
    situations: &[Situation],
    tol: f64,
) -> MultiplierValidation {
    let mut report = MultiplierValidation {
        checked: situations.len(),
        ..MultiplierValidation::default()
    };
    for s in situations {
        let m = strategy.multiplier(s.as_slice());
        if m.on_one < 0.0 || m.on_zero < 0.0 {
            report.negative_values.push(s.clone());
            continue;
        }
        let upper = system.forecast(s.as_slice()).upper_expectation(m);
        if upper > 1.0 + tol {
            report.violations.push(MultiplierViolation {
                situation: s.clone(),
                excess: upper - 1.0,
            });
        }
    }
    report
}

/// All situations of length `< depth`, i.e. the internal nodes of the
/// complete binary tree of the given depth.
pub fn situations_to_depth(depth: usize) -> Result<Vec<Situation>, TreeError> {
    if depth > MAX_TREE_DEPTH {
        return Err(TreeError::DepthGuard {
            depth,
            max: MAX_TREE_DEPTH,
        });
    }
    let mut all = Vec::with_capacity((1usize << depth) - 1);
    for len in 0..depth {
        for index in 0..(1usize << len) {
            all.push(Situation::from_index(index, len));
        }
    }
    Ok(all)
}

/// A real process tabulated on a complete binary subtree: `levels[k]` holds
/// the `2^k` values at depth `k`, indexed by the situation bits read as a
/// binary number (most significant bit first).
#[derive(Debug, Clone, PartialEq)]
pub struct TreeProcess {
    levels: Vec<Vec<f64>>,
}

impl TreeProcess {
    pub fn from_levels(levels: Vec<Vec<f64>>) -> Result<TreeProcess, TreeError> {
        let depth = levels.len().saturating_sub(1);
        if depth > MAX_TREE_DEPTH {
            return Err(TreeError::DepthGuard {
                depth,
                max: MAX_TREE_DEPTH,
            });
        }
        if levels.is_empty() {
            return Err(TreeError::IncompleteTable {
                depth: 0,
                expected: 1,
                got: 0,
            });
        }
        for (k, level) in levels.iter().enumerate() {
            if level.len() != 1usize << k {
                return Err(TreeError::IncompleteTable {
                    depth: k,
                    expected: 1usize << k,
                    got: level.len(),
                });
            }
        }
        Ok(TreeProcess { levels })
    }

    pub fn from_fn(depth: usize, f: impl Fn(&[Outcome]) -> f64) -> Result<TreeProcess, TreeError> {
        if depth > MAX_TREE_DEPTH {
            return Err(TreeError::DepthGuard {
                depth,
                max: MAX_TREE_DEPTH,
            });
        }
        let levels = (0..=depth)
            .map(|k| {
                (0..(1usize << k))
                    .map(|index| f(Situation::from_index(index, k).as_slice()))
                    .collect()
            })
            .collect();
        Ok(TreeProcess { levels })
    }

    /// Tabulate a capital process on the complete subtree of the given depth.
    pub fn from_capital_process(
        process: &dyn CapitalProcess,
        depth: usize,
    ) -> Result<TreeProcess, TreeError> {
        if depth > MAX_TREE_DEPTH {
            return Err(TreeError::DepthGuard {
                depth,
                max: MAX_TREE_DEPTH,
            });
        }
        let mut levels: Vec<Vec<f64>> = (0..=depth).map(|k| vec![0.0; 1usize << k]).collect();
        for leaf in 0..(1usize << depth) {
            let path = Situation::from_index(leaf, depth);
            let traj = process.log_trajectory(path.as_slice(), depth)?;
            for k in 0..=depth {
                levels[k][bits_to_index(&path.as_slice()[..k])] = traj.value_at(k);
            }
        }
        Ok(TreeProcess { levels })
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn value(&self, situation: &[Outcome]) -> f64 {
        self.levels[situation.len()][bits_to_index(situation)]
    }

    /// The process difference `ΔF(s)` as a gamble on the next outcome.
    pub fn difference(&self, situation: &[Outcome]) -> Gamble {
        let here = self.value(situation);
        let level = &self.levels[situation.len() + 1];
        let base = bits_to_index(situation) << 1;
        Gamble::new(level[base | 1] - here, level[base] - here)
    }
}

/// One failed supermartingale-difference check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupermartingaleViolation {
    pub situation: Situation,
    /// `E_upper(ΔF(s))`, which should be <= 0.
    pub upper_difference: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SupermartingaleValidation {
    pub checked: usize,
    pub violations: Vec<SupermartingaleViolation>,
}

impl SupermartingaleValidation {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check `E_upper(Γ(s), ΔF(s)) <= tol` at every internal node of the
/// tabulated subtree.
pub fn validate_supermartingale(
    process: &TreeProcess,
    system: &ForecastingSystem,
    tol: f64,
) -> SupermartingaleValidation {
    let mut report = SupermartingaleValidation::default();
    for len in 0..process.depth() {
        for index in 0..(1usize << len) {
            let situation = Situation::from_index(index, len);
            let delta = process.difference(situation.as_slice());
            let upper = system.forecast(situation.as_slice()).upper_expectation(delta);
            report.checked += 1;
            if upper > tol {
                report.violations.push(SupermartingaleViolation {
                    situation,
                    upper_difference: upper,
                });
            }
        }
    }
    report
}

/// A gamble on paths that only looks at the first `depth` outcomes, given as
/// a complete table of `2^depth` values indexed like [`TreeProcess`] levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGamble {
    depth: usize,
    values: Vec<f64>,
}

impl FiniteGamble {
    pub fn from_values(depth: usize, values: Vec<f64>) -> Result<FiniteGamble, TreeError> {
        if values.len() != 1usize << depth {
            return Err(TreeError::IncompleteTable {
                depth,
                expected: 1usize << depth,
                got: values.len(),
            });
        }
        Ok(FiniteGamble { depth, values })
    }

    pub fn from_fn(depth: usize, f: impl Fn(&[Outcome]) -> f64) -> FiniteGamble {
        let values = (0..(1usize << depth))
            .map(|index| f(Situation::from_index(index, depth).as_slice()))
            .collect();
        FiniteGamble { depth, values }
    }

    /// The indicator of the set of depth-`depth` situations satisfying the
    /// predicate.
    pub fn indicator(depth: usize, event: impl Fn(&[Outcome]) -> bool) -> FiniteGamble {
        FiniteGamble::from_fn(depth, |bits| if event(bits) { 1.0 } else { 0.0 })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn negated(&self) -> FiniteGamble {
        FiniteGamble {
            depth: self.depth,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

/// Finite-horizon global lower expectation: backward induction from the
/// leaves to the root, applying the local lower expectation at every internal
/// node.
pub fn finite_horizon_lower_expectation(
    system: &ForecastingSystem,
    gamble: &FiniteGamble,
) -> Result<f64, TreeError> {
    if gamble.depth > MAX_TREE_DEPTH {
        return Err(TreeError::DepthGuard {
            depth: gamble.depth,
            max: MAX_TREE_DEPTH,
        });
    }
    let mut values = gamble.values.clone();
    for len in (0..gamble.depth).rev() {
        let mut next = Vec::with_capacity(1usize << len);
        for index in 0..(1usize << len) {
            let situation = Situation::from_index(index, len);
            let local = Gamble::new(values[(index << 1) | 1], values[index << 1]);
            next.push(system.forecast(situation.as_slice()).lower_expectation(local));
        }
        values = next;
    }
    Ok(values[0])
}

/// Conjugate of [`finite_horizon_lower_expectation`]; shares its code path,
/// so the conjugacy identity is bit-exact.
pub fn finite_horizon_upper_expectation(
    system: &ForecastingSystem,
    gamble: &FiniteGamble,
) -> Result<f64, TreeError> {
    finite_horizon_lower_expectation(system, &gamble.negated()).map(|v| -v)
}

/// Outcome of a threshold test on a capital trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The capital crossed the Ville threshold: randomness for the audited
    /// forecasting system is rejected at level 1/K.
    Reject,
    /// The capital stayed below the threshold. Absence of evidence, not a
    /// certificate of randomness.
    NoEvidence,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Reject => write!(f, "reject"),
            Verdict::NoEvidence => write!(f, "no-evidence"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VilleVerdict {
    pub verdict: Verdict,
    pub threshold: f64,
    pub max_log_capital: f64,
    /// First step at which the running maximum is attained.
    pub argmax_step: usize,
}

/// Test a trajectory against a Ville threshold `K > 1`: by Ville's
/// inequality a test supermartingale exceeds `K` with probability at most
/// `1/K`.
pub fn ville_threshold_verdict(
    trajectory: &CapitalTrajectory,
    threshold: f64,
) -> Result<VilleVerdict, TreeError> {
    if threshold.is_nan() || threshold <= 1.0 {
        return Err(TreeError::InvalidThreshold(threshold));
    }
    let (max_log_capital, argmax_step) = trajectory.max_log();
    let verdict = if max_log_capital >= threshold.ln() {
        Verdict::Reject
    } else {
        Verdict::NoEvidence
    };
    Ok(VilleVerdict {
        verdict,
        threshold,
        max_log_capital,
        argmax_step,
    })
}
