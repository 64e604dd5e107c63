//! Convex mixtures of capital processes.
//!
//! A mixture with weights `w_i > 0`, `sum w_i <= 1`, holds the remaining
//! `1 - sum w_i` in cash (the constant-1 capital), so it is again a test
//! supermartingale whenever its components are. Trajectories are combined
//! in log domain via log-sum-exp; component capitals routinely overflow the
//! linear scale long before the mixture stops being meaningful.

use std::sync::Arc;

use crate::forecast::Outcome;
use crate::strategy::StrategyError;
use crate::tree::{CapitalProcess, CapitalTrajectory, TreeError};

pub struct MixtureProcess {
    name: String,
    components: Vec<(f64, Arc<dyn CapitalProcess>)>,
    cash: f64,
}

impl MixtureProcess {
    /// Build a mixture from positively weighted components; weights must sum
    /// to at most 1, and the remainder is held as cash.
    pub fn new(
        name: impl Into<String>,
        components: Vec<(f64, Arc<dyn CapitalProcess>)>,
    ) -> Result<MixtureProcess, StrategyError> {
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        let all_positive = components.iter().all(|(w, _)| *w > 0.0);
        if !all_positive || total > 1.0 + 1e-12 || components.is_empty() {
            return Err(StrategyError::InvalidMixtureWeights(total));
        }
        Ok(MixtureProcess {
            name: name.into(),
            components,
            cash: (1.0 - total).max(0.0),
        })
    }

    /// Hedge a single process with cash: capital `w·T + (1 - w)`.
    pub fn hedged(
        weight: f64,
        component: Arc<dyn CapitalProcess>,
    ) -> Result<MixtureProcess, StrategyError> {
        let name = format!("hedged(w={weight}, {})", component.name());
        MixtureProcess::new(name, vec![(weight, component)])
    }

    /// Equal-weight mixture of the given components with total weight
    /// `budget`.
    pub fn equal_weights(
        name: impl Into<String>,
        budget: f64,
        components: Vec<Arc<dyn CapitalProcess>>,
    ) -> Result<MixtureProcess, StrategyError> {
        let n = components.len().max(1);
        let w = budget / n as f64;
        MixtureProcess::new(name, components.into_iter().map(|c| (w, c)).collect())
    }

    pub fn components(&self) -> &[(f64, Arc<dyn CapitalProcess>)] {
        &self.components
    }

    pub fn cash_weight(&self) -> f64 {
        self.cash
    }
}

/// Stable log of `sum exp(terms)`.
fn log_sum_exp(terms: &[f64]) -> f64 {
    let m = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

impl CapitalProcess for MixtureProcess {
    fn log_trajectory(
        &self,
        path: &[Outcome],
        horizon: usize,
    ) -> Result<CapitalTrajectory, TreeError> {
        let trajectories = self
            .components
            .iter()
            .map(|(_, c)| c.log_trajectory(path, horizon))
            .collect::<Result<Vec<_>, _>>()?;
        let log_cash = if self.cash > 0.0 {
            Some(self.cash.ln())
        } else {
            None
        };
        let mut log_values = Vec::with_capacity(horizon + 1);
        let mut terms = Vec::with_capacity(self.components.len() + 1);
        for k in 0..=horizon {
            terms.clear();
            for ((w, _), traj) in self.components.iter().zip(&trajectories) {
                terms.push(w.ln() + traj.log_at(k));
            }
            if let Some(c) = log_cash {
                terms.push(c);
            }
            log_values.push(log_sum_exp(&terms));
        }
        // The root value is sum of weights + cash = 1 up to rounding; pin it
        // so the trajectory invariant holds exactly.
        debug_assert!(log_values[0].abs() < 1e-9);
        log_values[0] = 0.0;
        CapitalTrajectory::from_log_values(log_values)
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forecast::Gamble;
    use crate::tree::ConstantMultiplier;

    #[test]
    fn weights_are_validated() {
        let comp: Arc<dyn CapitalProcess> = Arc::new(ConstantMultiplier(Gamble::constant(1.0)));
        assert!(MixtureProcess::new("m", vec![(0.6, comp.clone()), (0.6, comp.clone())]).is_err());
        assert!(MixtureProcess::new("m", vec![(-0.1, comp.clone())]).is_err());
        assert!(MixtureProcess::new("m", vec![]).is_err());
        assert!(MixtureProcess::new("m", vec![(0.25, comp)]).is_ok());
    }

    #[test]
    fn mixture_of_identities_is_identity() {
        let comp: Arc<dyn CapitalProcess> = Arc::new(ConstantMultiplier(Gamble::constant(1.0)));
        let mix = MixtureProcess::new("m", vec![(0.5, comp.clone()), (0.25, comp)]).unwrap();
        let path = vec![Outcome::One; 10];
        let traj = mix.log_trajectory(&path, 10).unwrap();
        for k in 0..=10 {
            assert!(traj.log_at(k).abs() < 1e-12);
        }
    }

    #[test]
    fn hedged_growth_is_damped_by_the_weight() {
        let double: Arc<dyn CapitalProcess> = Arc::new(ConstantMultiplier(Gamble::new(2.0, 2.0)));
        let mix = MixtureProcess::hedged(0.25, double).unwrap();
        let path = vec![Outcome::One; 8];
        let traj = mix.log_trajectory(&path, 8).unwrap();
        let expected = 0.25 * 2.0f64.powi(8) + 0.75;
        assert!((traj.value_at(8) - expected).abs() < 1e-9);
    }

    #[test]
    fn zero_capital_component_leaves_the_cash() {
        let dies: Arc<dyn CapitalProcess> = Arc::new(ConstantMultiplier(Gamble::new(0.0, 0.0)));
        let mix = MixtureProcess::hedged(0.5, dies).unwrap();
        let path = vec![Outcome::One; 3];
        let traj = mix.log_trajectory(&path, 3).unwrap();
        assert!((traj.value_at(3) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_huge_terms() {
        let x = log_sum_exp(&[1000.0, 999.0, f64::NEG_INFINITY]);
        assert!((x - (1000.0 + (1.0 + (-1.0f64).exp()).ln())).abs() < 1e-12);
        assert_eq!(log_sum_exp(&[f64::NEG_INFINITY]), f64::NEG_INFINITY);
    }
}
