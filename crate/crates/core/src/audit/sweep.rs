//! The stationary-interval sweep: audit every interval on a grid and read
//! off the surviving filter.
//!
//! Rejection factorizes through the interval endpoints. The endpoint-bet
//! family in direction high depends only on the upper bound and its capital
//! is pointwise antitone in it; dually for direction low and the lower
//! bound. The calibration mixtures with the identity gamble depend only on
//! the lower bound (its forecast lower expectation), those with the negated
//! identity only on the upper bound, and both are monotone the same way. The
//! surviving set is therefore exactly upward closed under interval
//! inclusion, which the report asserts literally.
//!
//! Mixtures are run only on the minimal surviving candidates; a mixture
//! rejection propagates to subsets (which monotonicity already condemns) and
//! never to supersets, iterating until the minimal candidates stand.

use std::collections::HashMap;

use serde::Serialize;

use crate::forecast::{Gamble, IntervalForecast, Outcome};
use crate::selection::SelectionProcess;
use crate::strategy::{mixture_calibration, BetDirection, EndpointBet};
use crate::systems::ForecastingSystem;
use crate::tree::{CapitalProcess, Verdict};

use super::battery::{DEFAULT_BET_SIZES, DEFAULT_MIXTURE_ORDER};
use super::AuditError;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub horizon: usize,
    pub threshold: f64,
    /// Grid step in [0.01, 0.25].
    pub grid_step: f64,
    pub bet_sizes: Vec<f64>,
    pub mixture_selections: Vec<SelectionProcess>,
    pub mixture_order: u32,
    pub parallel: bool,
}

impl SweepConfig {
    pub fn new(horizon: usize, grid_step: f64) -> SweepConfig {
        SweepConfig {
            horizon,
            threshold: 100.0,
            grid_step,
            bet_sizes: DEFAULT_BET_SIZES.to_vec(),
            mixture_selections: vec![
                SelectionProcess::All,
                SelectionProcess::EvenSteps,
                SelectionProcess::OddSteps,
            ],
            mixture_order: DEFAULT_MIXTURE_ORDER,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepCell {
    pub lower: f64,
    pub upper: f64,
    pub verdict: Verdict,
    /// Largest log capital reached by any battery member run on this cell.
    pub max_log_capital: f64,
    /// What rejected the cell, when something did.
    pub rejected_by: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub grid_step: f64,
    pub grid: Vec<f64>,
    pub horizon: usize,
    pub threshold: f64,
    /// All cells `[grid[i], grid[j]]` with `i <= j`, ordered by `(i, j)`.
    pub cells: Vec<SweepCell>,
    pub minimal_survivors: Vec<(f64, f64)>,
    /// Largest surviving lower bound over the minimal survivors.
    pub lambda_hat: f64,
    /// Smallest surviving upper bound over the minimal survivors.
    pub upsilon_hat: f64,
    pub upward_closed: bool,
    /// Whether `[lambda_hat, upsilon_hat]` is a non-empty interval.
    pub filter_nonempty: bool,
}

fn grid_points(step: f64) -> Vec<f64> {
    let count = (1.0 / step + 1e-9).floor() as usize;
    let mut points: Vec<f64> = (0..=count).map(|i| (i as f64 * step).min(1.0)).collect();
    if 1.0 - points.last().copied().unwrap_or(0.0) > 1e-9 {
        points.push(1.0);
    }
    points
}

/// Max log capital of one endpoint bet along the path.
fn endpoint_run(path: &[Outcome], endpoint: f64, lam: f64, direction: BetDirection) -> f64 {
    let interval = match direction {
        BetDirection::High => IntervalForecast::new_unchecked(0.0, endpoint),
        BetDirection::Low => IntervalForecast::new_unchecked(endpoint, 1.0),
    };
    let bet = EndpointBet::new(interval, lam, direction).expect("validated bet size");
    let gamble = crate::tree::MultiplierStrategy::multiplier(&bet, &[]);
    let log_one = gamble.on_one.ln();
    let log_zero = gamble.on_zero.ln();
    let mut log_capital = 0.0f64;
    let mut best = 0.0f64;
    for &x in path {
        log_capital += match x {
            Outcome::One => log_one,
            Outcome::Zero => log_zero,
        };
        if log_capital > best {
            best = log_capital;
        }
    }
    best
}

/// Max log capital over the calibration mixtures for one endpoint. The
/// identity gamble probes the lower bound, its negation the upper bound.
fn mixture_run(
    path: &[Outcome],
    endpoint: f64,
    direction: BetDirection,
    config: &SweepConfig,
) -> (f64, String) {
    let (system, gamble) = match direction {
        BetDirection::Low => (
            ForecastingSystem::stationary(IntervalForecast::new_unchecked(endpoint, 1.0)),
            Gamble::identity(),
        ),
        BetDirection::High => (
            ForecastingSystem::stationary(IntervalForecast::new_unchecked(0.0, endpoint)),
            -Gamble::identity(),
        ),
    };
    let mut best = (f64::NEG_INFINITY, String::new());
    for sel in &config.mixture_selections {
        let mixture = mixture_calibration(&system, gamble, sel, config.mixture_order)
            .expect("positive mixture order");
        let traj = mixture
            .log_trajectory(path, path.len())
            .expect("calibration multipliers are non-negative");
        let (max_log, _) = traj.max_log();
        if max_log > best.0 {
            best = (max_log, mixture.name());
        }
    }
    best
}

struct EndpointTables {
    /// Per grid index: best (max log capital, bet size) in direction high.
    high_bets: Vec<(f64, f64)>,
    low_bets: Vec<(f64, f64)>,
}

fn run_endpoint_bets(path: &[Outcome], points: &[f64], config: &SweepConfig) -> EndpointTables {
    let mut tasks = Vec::new();
    for (pi, &endpoint) in points.iter().enumerate() {
        for &lam in &config.bet_sizes {
            for direction in [BetDirection::High, BetDirection::Low] {
                tasks.push((pi, endpoint, lam, direction));
            }
        }
    }
    let results = crate::par::map(config.parallel, tasks, |(pi, endpoint, lam, direction)| {
        (pi, lam, direction, endpoint_run(path, endpoint, lam, direction))
    });
    let mut tables = EndpointTables {
        high_bets: vec![(f64::NEG_INFINITY, 0.0); points.len()],
        low_bets: vec![(f64::NEG_INFINITY, 0.0); points.len()],
    };
    for (pi, lam, direction, max_log) in results {
        let slot = match direction {
            BetDirection::High => &mut tables.high_bets[pi],
            BetDirection::Low => &mut tables.low_bets[pi],
        };
        if max_log > slot.0 {
            *slot = (max_log, lam);
        }
    }
    tables
}

/// Audit every grid interval `[l, u]` with the monotone endpoint-bet battery
/// plus calibration mixtures on the minimal surviving candidates, and derive
/// the surviving filter's bounds.
pub fn sweep_constant_intervals(
    path: &[Outcome],
    config: &SweepConfig,
) -> Result<SweepReport, AuditError> {
    if !(0.01..=0.25).contains(&config.grid_step) {
        return Err(AuditError::GridStep(config.grid_step));
    }
    if config.horizon > path.len() {
        return Err(crate::tree::TreeError::HorizonExceedsPath {
            horizon: config.horizon,
            path_len: path.len(),
        }
        .into());
    }
    if config.threshold.is_nan() || config.threshold <= 1.0 {
        return Err(crate::tree::TreeError::InvalidThreshold(config.threshold).into());
    }
    let path = &path[..config.horizon];
    let points = grid_points(config.grid_step);
    let n = points.len();
    let log_threshold = config.threshold.ln();

    let tables = run_endpoint_bets(path, &points, config);

    // Cell state, indexed by (li, ui) with li <= ui.
    let cell_id = |li: usize, ui: usize| li * n + ui;
    let mut rejected: Vec<Option<String>> = vec![None; n * n];
    let mut max_log: Vec<f64> = vec![f64::NEG_INFINITY; n * n];
    for li in 0..n {
        for ui in li..n {
            let (high, high_lam) = tables.high_bets[ui];
            let (low, low_lam) = tables.low_bets[li];
            let id = cell_id(li, ui);
            max_log[id] = high.max(low).max(0.0);
            if high >= log_threshold || low >= log_threshold {
                let (direction, lam, endpoint) = if high >= low {
                    ("high", high_lam, points[ui])
                } else {
                    ("low", low_lam, points[li])
                };
                rejected[id] = Some(format!("endpoint-bet({direction}, lam={lam}, at={endpoint})"));
            }
        }
    }

    // Lazy per-endpoint mixture verdicts, shared across candidate rounds.
    let mut low_mixture: HashMap<usize, (f64, String)> = HashMap::new();
    let mut high_mixture: HashMap<usize, (f64, String)> = HashMap::new();

    loop {
        // Minimal surviving cells: no surviving immediate shrink.
        let surviving = |li: usize, ui: usize, rejected: &Vec<Option<String>>| {
            li <= ui && rejected[cell_id(li, ui)].is_none()
        };
        let mut candidates = Vec::new();
        for li in 0..n {
            for ui in li..n {
                if surviving(li, ui, &rejected)
                    && !(li < ui && surviving(li + 1, ui, &rejected))
                    && !(li < ui && surviving(li, ui - 1, &rejected))
                {
                    candidates.push((li, ui));
                }
            }
        }

        // Evaluate the mixtures this round needs, in parallel, then fold
        // into the memo tables in deterministic order.
        let mut needed: Vec<(usize, BetDirection)> = Vec::new();
        for &(li, ui) in &candidates {
            if !low_mixture.contains_key(&li) && !needed.contains(&(li, BetDirection::Low)) {
                needed.push((li, BetDirection::Low));
            }
            if !high_mixture.contains_key(&ui) && !needed.contains(&(ui, BetDirection::High)) {
                needed.push((ui, BetDirection::High));
            }
        }
        let computed = crate::par::map(config.parallel, needed, |(pi, direction)| {
            let run = mixture_run(path, points[pi], direction, config);
            (pi, direction, run)
        });
        for (pi, direction, run) in computed {
            match direction {
                BetDirection::Low => low_mixture.insert(pi, run),
                BetDirection::High => high_mixture.insert(pi, run),
            };
        }

        let mut newly_rejected = Vec::new();
        for &(li, ui) in &candidates {
            let low = &low_mixture[&li];
            let high = &high_mixture[&ui];
            let (worst, name) = if low.0 >= high.0 { low } else { high };
            let id = cell_id(li, ui);
            max_log[id] = max_log[id].max(low.0).max(high.0);
            if *worst >= log_threshold {
                rejected[id] = Some(name.clone());
                newly_rejected.push((li, ui));
            }
        }
        if newly_rejected.is_empty() {
            break;
        }
        // Propagate each rejection downward to its subsets.
        for (li, ui) in newly_rejected {
            for li2 in li..n {
                for ui2 in li2..=ui {
                    if ui2 >= li2 && li2 >= li && ui2 <= ui {
                        let id = cell_id(li2, ui2);
                        if rejected[id].is_none() {
                            rejected[id] = Some(format!(
                                "propagated-from([{}, {}])",
                                points[li], points[ui]
                            ));
                        }
                    }
                }
            }
        }
    }

    // Assemble cells and derive the surviving structure.
    let mut cells = Vec::new();
    let mut minimal_survivors = Vec::new();
    let surviving =
        |li: usize, ui: usize, rejected: &Vec<Option<String>>| rejected[cell_id(li, ui)].is_none();
    for li in 0..n {
        for ui in li..n {
            let id = cell_id(li, ui);
            let verdict = if rejected[id].is_some() {
                Verdict::Reject
            } else {
                Verdict::NoEvidence
            };
            if verdict == Verdict::NoEvidence
                && !(li < ui && surviving(li + 1, ui, &rejected))
                && !(li < ui && surviving(li, ui - 1, &rejected))
            {
                minimal_survivors.push((points[li], points[ui]));
            }
            cells.push(SweepCell {
                lower: points[li],
                upper: points[ui],
                verdict,
                max_log_capital: max_log[id],
                rejected_by: rejected[id].clone(),
            });
        }
    }

    // Literal upward-closure check over all cell pairs.
    let mut upward_closed = true;
    for li in 0..n {
        for ui in li..n {
            if surviving(li, ui, &rejected) {
                for lj in 0..=li {
                    for uj in ui..n {
                        if !surviving(lj, uj, &rejected) {
                            upward_closed = false;
                        }
                    }
                }
            }
        }
    }

    let lambda_hat = minimal_survivors
        .iter()
        .map(|&(l, _)| l)
        .fold(f64::NEG_INFINITY, f64::max);
    let upsilon_hat = minimal_survivors
        .iter()
        .map(|&(_, u)| u)
        .fold(f64::INFINITY, f64::min);

    Ok(SweepReport {
        grid_step: config.grid_step,
        grid: points,
        horizon: config.horizon,
        threshold: config.threshold,
        cells,
        minimal_survivors,
        lambda_hat,
        upsilon_hat,
        upward_closed,
        filter_nonempty: lambda_hat <= upsilon_hat,
    })
}
