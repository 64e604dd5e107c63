//! Calibration betting: the positive supermartingale that grows whenever the
//! selected average of a gamble's excess over its forecast lower expectation
//! stays negative.
//!
//! For a gamble `f` and forecasting system `Γ`, the cumulative process
//! `S(x_1..x_n) = sum_k [f(x_k) - E_lower(Γ(x_1..x_{k-1}), f)]` is a
//! submartingale whose increments `ΔS(s) = f - E_lower(Γ(s), f)` have lower
//! expectation exactly 0 and are bounded by `B = max(1, max f - min f)`.
//! With `0 < xi < 1/B`, the multiplier `1 - xi·sel(s)·ΔS(s)` stays positive,
//! has upper expectation exactly 1, and its capital obeys the growth bound
//!
//! ```text
//! selected_average(S) <= -eps at step n
//!     =>  capital >= exp(eps²/(4B²) · sum sel)     with xi = eps/(2B²).
//! ```
//!
//! The truncated mixture stacks these processes for `eps_r = 2^-r`,
//! `r = 1..R`, with weights `2^-r` and a constant cash remainder `2^-R`, so
//! the whole thing is one test supermartingale bounded by `(3/2)^n`.

use std::sync::Arc;

use crate::forecast::{Gamble, Outcome};
use crate::selection::SelectionProcess;
use crate::strategy::{MixtureProcess, StrategyError};
use crate::systems::ForecastingSystem;
use crate::tree::{CapitalProcess, MultiplierStrategy};

/// The submartingale of cumulative excesses of `f` over its forecast lower
/// expectation, carried implicitly through its per-situation increments.
#[derive(Debug, Clone)]
pub struct ExcessSubmartingale {
    gamble: Gamble,
    system: ForecastingSystem,
}

impl ExcessSubmartingale {
    pub fn new(gamble: Gamble, system: ForecastingSystem) -> ExcessSubmartingale {
        ExcessSubmartingale { gamble, system }
    }

    pub fn gamble(&self) -> Gamble {
        self.gamble
    }

    pub fn system(&self) -> &ForecastingSystem {
        &self.system
    }

    /// The increment `ΔS(s) = f - E_lower(Γ(s), f)` as a gamble.
    pub fn difference(&self, situation: &[Outcome]) -> Gamble {
        let floor = self.system.forecast(situation).lower_expectation(self.gamble);
        self.gamble.shifted(-floor)
    }

    /// The uniform increment bound `B = max(1, max f - min f)`.
    pub fn bound(&self) -> f64 {
        self.gamble.range().max(1.0)
    }
}

/// Betting-fraction parameters for a calibration strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationParams {
    epsilon: f64,
    xi: f64,
    b: f64,
}

impl CalibrationParams {
    /// Standard choice `xi = eps/(2B²)`, which keeps `0 < xi < 1/B` for any
    /// `0 < eps < B`.
    pub fn new(epsilon: f64, b: f64) -> Result<CalibrationParams, StrategyError> {
        if !(b > 0.0 && epsilon > 0.0 && epsilon < b) {
            return Err(StrategyError::InvalidCalibration { epsilon, b });
        }
        Ok(CalibrationParams {
            epsilon,
            xi: epsilon / (2.0 * b * b),
            b,
        })
    }

    /// Explicit betting fraction; must satisfy `0 < xi < 1/B`.
    pub fn with_xi(xi: f64, b: f64) -> Result<CalibrationParams, StrategyError> {
        if !(b > 0.0 && xi > 0.0 && xi < 1.0 / b) {
            return Err(StrategyError::InvalidXi { xi, b });
        }
        Ok(CalibrationParams {
            epsilon: xi * 2.0 * b * b,
            xi,
            b,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn bound(&self) -> f64 {
        self.b
    }

    /// The guaranteed growth exponent per selected step once the selected
    /// average is at or below `-epsilon`: `eps²/(4B²)`.
    pub fn growth_rate(&self) -> f64 {
        self.epsilon * self.epsilon / (4.0 * self.b * self.b)
    }
}

/// The multiplier `D(s) = 1 - xi·sel(s)·ΔS(s)`, a positive supermartingale
/// multiplier for the submartingale's own forecasting system.
#[derive(Debug, Clone)]
pub struct CalibrationStrategy {
    submartingale: ExcessSubmartingale,
    selection: SelectionProcess,
    params: CalibrationParams,
}

impl CalibrationStrategy {
    pub fn new(
        submartingale: ExcessSubmartingale,
        selection: SelectionProcess,
        params: CalibrationParams,
    ) -> Result<CalibrationStrategy, StrategyError> {
        // The bound baked into the params must dominate the submartingale's
        // own increment bound, else positivity is lost.
        if params.bound() < submartingale.bound() {
            return Err(StrategyError::InvalidCalibration {
                epsilon: params.epsilon(),
                b: params.bound(),
            });
        }
        Ok(CalibrationStrategy {
            submartingale,
            selection,
            params,
        })
    }

    pub fn params(&self) -> CalibrationParams {
        self.params
    }

    pub fn selection(&self) -> &SelectionProcess {
        &self.selection
    }

    pub fn submartingale(&self) -> &ExcessSubmartingale {
        &self.submartingale
    }
}

impl MultiplierStrategy for CalibrationStrategy {
    fn multiplier(&self, situation: &[Outcome]) -> Gamble {
        if !self.selection.selects(situation) {
            return Gamble::constant(1.0);
        }
        let delta = self.submartingale.difference(situation);
        delta.scaled(-self.params.xi).shifted(1.0)
    }

    fn name(&self) -> String {
        format!(
            "calibration(f=({}, {}), sel={}, eps={:.6})",
            self.submartingale.gamble.on_one,
            self.submartingale.gamble.on_zero,
            self.selection,
            self.params.epsilon
        )
    }
}

/// The truncated countable mixture of calibration processes: component `r`
/// uses `xi_r = 1/(2^{r+1} B²)` (that is, `eps_r = 2^-r`) with weight
/// `2^-r`, and the residual weight `2^-R` rides as cash so the total weight
/// is exactly 1.
pub fn mixture_calibration(
    system: &ForecastingSystem,
    gamble: Gamble,
    selection: &SelectionProcess,
    order: u32,
) -> Result<MixtureProcess, StrategyError> {
    if order == 0 {
        return Err(StrategyError::InvalidMixtureOrder);
    }
    let submartingale = ExcessSubmartingale::new(gamble, system.clone());
    let b = submartingale.bound();
    let mut components: Vec<(f64, Arc<dyn CapitalProcess>)> = Vec::new();
    for r in 1..=order {
        let weight = 0.5f64.powi(r as i32);
        let params = CalibrationParams::new(weight, b)?;
        let component =
            CalibrationStrategy::new(submartingale.clone(), selection.clone(), params)?;
        components.push((weight, Arc::new(component)));
    }
    MixtureProcess::new(
        format!(
            "calibration-mixture(f=({}, {}), sel={}, order={})",
            gamble.on_one, gamble.on_zero, selection, order
        ),
        components,
    )
}
