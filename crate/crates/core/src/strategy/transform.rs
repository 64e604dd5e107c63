//! Strategy and capital-process transformers: parity masking, tail
//! switching, the multiplier split, and the capping mixture that turns
//! "unbounded" capital into "converges to infinity" capital.

use std::sync::Arc;

use crate::forecast::{Gamble, Outcome};
use crate::strategy::StrategyError;
use crate::tree::{CapitalProcess, CapitalTrajectory, MultiplierStrategy, TreeError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn matches(self, step: usize) -> bool {
        match self {
            Parity::Even => step.is_multiple_of(2),
            Parity::Odd => !step.is_multiple_of(2),
        }
    }
}

/// Play the base strategy only at steps of the kept parity; the identity
/// gamble elsewhere. Masked steps validate against any forecasting system,
/// so a masked strategy inherits validity on a strictly larger family of
/// systems than its base.
#[derive(Debug, Clone)]
pub struct ParityMasked<D> {
    base: D,
    keep: Parity,
}

pub fn parity_masked<D: MultiplierStrategy>(base: D, keep: Parity) -> ParityMasked<D> {
    ParityMasked { base, keep }
}

impl<D: MultiplierStrategy> MultiplierStrategy for ParityMasked<D> {
    fn multiplier(&self, situation: &[Outcome]) -> Gamble {
        let step = situation.len() + 1;
        if self.keep.matches(step) {
            self.base.multiplier(situation)
        } else {
            Gamble::constant(1.0)
        }
    }

    fn name(&self) -> String {
        let parity = match self.keep {
            Parity::Even => "even",
            Parity::Odd => "odd",
        };
        format!("{}[{parity}-steps]", self.base.name())
    }
}

/// Hold the identity gamble for every step before `start`, then play the
/// base strategy. Useful when the base is only valid from some step on:
/// the switched strategy is valid everywhere.
#[derive(Debug, Clone)]
pub struct TailSwitch<D> {
    base: D,
    start: usize,
}

pub fn tail_switch<D: MultiplierStrategy>(base: D, start: usize) -> Result<TailSwitch<D>, StrategyError> {
    if start == 0 {
        return Err(StrategyError::InvalidTailSwitchStart);
    }
    Ok(TailSwitch { base, start })
}

impl<D: MultiplierStrategy> MultiplierStrategy for TailSwitch<D> {
    fn multiplier(&self, situation: &[Outcome]) -> Gamble {
        let step = situation.len() + 1;
        if step < self.start {
            Gamble::constant(1.0)
        } else {
            self.base.multiplier(situation)
        }
    }

    fn name(&self) -> String {
        format!("{}[from-step-{}]", self.base.name(), self.start)
    }
}

/// Which half of the multiplier a [`MultiplierSplit`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSide {
    /// Clip the payoff on 1 down to 1 and lift the payoff on 0 up to 1:
    /// keeps the bets that profit on zeros. Valid for intervals that extend
    /// above the base interval's upper bound.
    ZeroFavoring,
    /// The mirror image: keeps the bets that profit on ones. Valid for
    /// intervals extending below the base lower bound.
    OneFavoring,
}

#[derive(Debug, Clone)]
pub struct MultiplierSplit<D> {
    base: D,
    side: SplitSide,
}

impl<D: MultiplierStrategy> MultiplierStrategy for MultiplierSplit<D> {
    fn multiplier(&self, situation: &[Outcome]) -> Gamble {
        let m = self.base.multiplier(situation);
        match self.side {
            SplitSide::ZeroFavoring => Gamble::new(m.on_one.min(1.0), m.on_zero.max(1.0)),
            SplitSide::OneFavoring => Gamble::new(m.on_one.max(1.0), m.on_zero.min(1.0)),
        }
    }

    fn name(&self) -> String {
        let side = match self.side {
            SplitSide::ZeroFavoring => "zero-favoring",
            SplitSide::OneFavoring => "one-favoring",
        };
        format!("{}[{side}]", self.base.name())
    }
}

/// The two halves of a split multiplier. Their pointwise product always
/// reproduces the base (`min(a,1)·max(a,1) = a` for `a >= 0`), and validity
/// transfers per side when the base is valid for the intersection interval.
pub struct SplitMultipliers<D> {
    /// Valid for the interval reaching higher than the intersection.
    pub zero_favoring: MultiplierSplit<D>,
    /// Valid for the interval reaching lower.
    pub one_favoring: MultiplierSplit<D>,
}

/// Split a multiplier into its zero-favoring and one-favoring halves.
pub fn split_multiplier<D: MultiplierStrategy + Clone>(base: D) -> SplitMultipliers<D> {
    SplitMultipliers {
        zero_favoring: MultiplierSplit {
            base: base.clone(),
            side: SplitSide::ZeroFavoring,
        },
        one_favoring: MultiplierSplit {
            base,
            side: SplitSide::OneFavoring,
        },
    }
}

/// The case condition from the validity-transfer argument: at most one of
/// the two multiplier values exceeds 1. Any multiplier valid for a
/// non-empty interval satisfies it (both values above 1 would force the
/// upper expectation above 1), so a `false` here flags a base multiplier
/// that was never a supermartingale multiplier to begin with.
pub fn split_condition_holds<D: MultiplierStrategy + ?Sized>(
    base: &D,
    situation: &[Outcome],
) -> bool {
    let m = base.multiplier(situation);
    !(m.on_one > 1.0 && m.on_zero > 1.0)
}

/// Apply the capping mixture to a trajectory: component `n` freezes at `2^n`
/// once the running maximum has reached `2^n`, and the capped components are
/// combined with weights `2^-n` for `n = 1..=levels` plus a cash remainder
/// `2^-levels`. After capital first reaches `2^k`, the output stays at least
/// `k`.
pub fn cap_trajectory(trajectory: &CapitalTrajectory, levels: u32) -> CapitalTrajectory {
    let ln2 = std::f64::consts::LN_2;
    let residual = 0.5f64.powi(levels as i32);
    let mut frozen = 0u32;
    let log_values = trajectory
        .log_values()
        .iter()
        .map(|&log_t| {
            while frozen < levels && log_t >= (frozen as f64 + 1.0) * ln2 {
                frozen += 1;
            }
            // frozen components contribute 2^-n * 2^n = 1 each; live ones
            // share the base capital at geometrically decaying weights.
            let live_weight = if frozen == levels {
                0.0
            } else {
                0.5f64.powi(frozen as i32) - residual
            };
            let live = if live_weight > 0.0 && log_t > f64::NEG_INFINITY {
                live_weight * log_t.exp()
            } else {
                0.0
            };
            (frozen as f64 + live + residual).ln()
        })
        .collect();
    CapitalTrajectory::from_log_values(log_values).expect("capped capital stays positive")
}

/// Capital-process form of [`cap_trajectory`]: wraps a base process so the
/// transform applies along any path.
pub struct CappedProcess {
    base: Arc<dyn CapitalProcess>,
    levels: u32,
}

pub fn cap_and_mix(base: Arc<dyn CapitalProcess>, levels: u32) -> CappedProcess {
    CappedProcess { base, levels }
}

impl CapitalProcess for CappedProcess {
    fn log_trajectory(
        &self,
        path: &[Outcome],
        horizon: usize,
    ) -> Result<CapitalTrajectory, TreeError> {
        Ok(cap_trajectory(
            &self.base.log_trajectory(path, horizon)?,
            self.levels,
        ))
    }

    fn name(&self) -> String {
        format!("capped(levels={}, {})", self.levels, self.base.name())
    }
}
