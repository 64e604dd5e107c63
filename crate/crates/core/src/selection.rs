//! Selection processes: 0/1-valued maps on situations that pick which steps
//! enter a relative-frequency computation.
//!
//! A selection is evaluated at the conditioning situation: `selects(s)`
//! decides whether the step producing the next outcome `x_{len(s)+1}` counts.
//! Step indices are 1-based, so `EvenSteps` picks `x_2, x_4, ...`.

use std::collections::HashMap;
use std::fmt;
use std::num::NonZeroU32;

use crate::forecast::Outcome;
use crate::tree::Situation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectionProcess {
    /// Every step.
    All,
    /// Steps with an even 1-based index.
    EvenSteps,
    /// Steps with an odd 1-based index.
    OddSteps,
    /// Steps whose index is a multiple of `k`.
    EveryK(NonZeroU32),
    /// Steps immediately following an outcome of 1.
    AfterOnes,
    /// Explicit table; unlisted situations are not selected.
    Table(HashMap<Situation, bool>),
}

impl SelectionProcess {
    pub fn every_k(k: u32) -> Option<SelectionProcess> {
        NonZeroU32::new(k).map(SelectionProcess::EveryK)
    }

    /// Whether the step following `situation` is selected.
    pub fn selects(&self, situation: &[Outcome]) -> bool {
        let step = situation.len() + 1;
        match self {
            SelectionProcess::All => true,
            SelectionProcess::EvenSteps => step.is_multiple_of(2),
            SelectionProcess::OddSteps => !step.is_multiple_of(2),
            SelectionProcess::EveryK(k) => step.is_multiple_of(k.get() as usize),
            SelectionProcess::AfterOnes => situation.last() == Some(&Outcome::One),
            SelectionProcess::Table(map) => map.get(situation).copied().unwrap_or(false),
        }
    }

    /// 0/1 weight form of [`SelectionProcess::selects`].
    #[inline]
    pub fn weight(&self, situation: &[Outcome]) -> f64 {
        if self.selects(situation) {
            1.0
        } else {
            0.0
        }
    }
}

impl fmt::Display for SelectionProcess {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionProcess::All => write!(f, "all"),
            SelectionProcess::EvenSteps => write!(f, "even"),
            SelectionProcess::OddSteps => write!(f, "odd"),
            SelectionProcess::EveryK(k) => write!(f, "every-{k}"),
            SelectionProcess::AfterOnes => write!(f, "after-ones"),
            SelectionProcess::Table(map) => write!(f, "table({} entries)", map.len()),
        }
    }
}
