//! Chance constraints on the hidden state, evaluated under the belief.

use super::{Belief, ModelError, RawConstraint};
use crate::model::io::RawStageConstraint;

/// Slack applied when comparing safe-state mass with `1 - epsilon`.
pub const CONSTRAINT_SLACK: f64 = 1e-12;

/// `P[x ∈ safe_states] ≥ 1 − epsilon`, evaluated as the belief mass on the
/// safe set.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefConstraint {
    safe_states: Vec<usize>,
    epsilon: f64,
}

impl BeliefConstraint {
    pub fn new(safe_states: Vec<usize>, epsilon: f64, n_states: usize) -> Result<Self, ModelError> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(ModelError::Constraint(format!(
                "epsilon must lie in [0, 1) (got {epsilon})"
            )));
        }
        let mut safe_states = safe_states;
        safe_states.sort_unstable();
        safe_states.dedup();
        if let Some(&bad) = safe_states.iter().find(|&&s| s >= n_states) {
            return Err(ModelError::Constraint(format!(
                "safe state {bad} out of range for {n_states} states"
            )));
        }
        Ok(BeliefConstraint {
            safe_states,
            epsilon,
        })
    }

    pub fn safe_states(&self) -> &[usize] {
        &self.safe_states
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn safe_mass(&self, belief: &Belief) -> f64 {
        belief.mass_on(&self.safe_states)
    }

    pub fn is_satisfied(&self, belief: &Belief) -> bool {
        self.safe_mass(belief) >= 1.0 - self.epsilon - CONSTRAINT_SLACK
    }

    /// True when every belief satisfying `self` also satisfies `outer`.
    pub fn is_nested_in(&self, outer: &BeliefConstraint) -> bool {
        self.epsilon <= outer.epsilon
            && self
                .safe_states
                .iter()
                .all(|s| outer.safe_states.binary_search(s).is_ok())
    }

    fn to_raw(&self) -> RawStageConstraint {
        RawStageConstraint {
            safe_states: self.safe_states.clone(),
            epsilon: self.epsilon,
        }
    }
}

/// Constraint sets `C_0, …, C_N`; either one set for every stage or an
/// explicit nested list.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintSchedule {
    Uniform(BeliefConstraint),
    PerStage(Vec<BeliefConstraint>),
}

impl ConstraintSchedule {
    pub(crate) fn from_raw(
        raw: &RawConstraint,
        n_states: usize,
        horizon: usize,
    ) -> Result<Self, ModelError> {
        match raw {
            RawConstraint::Uniform(c) => Ok(ConstraintSchedule::Uniform(BeliefConstraint::new(
                c.safe_states.clone(),
                c.epsilon,
                n_states,
            )?)),
            RawConstraint::PerStage(list) => {
                if list.len() != horizon + 1 {
                    return Err(ModelError::Constraint(format!(
                        "per-stage constraint list needs {} entries (stages 0..=N), found {}",
                        horizon + 1,
                        list.len()
                    )));
                }
                let stages = list
                    .iter()
                    .map(|c| BeliefConstraint::new(c.safe_states.clone(), c.epsilon, n_states))
                    .collect::<Result<Vec<_>, _>>()?;
                for (j, pair) in stages.windows(2).enumerate() {
                    if !pair[1].is_nested_in(&pair[0]) {
                        return Err(ModelError::Constraint(format!(
                            "stage {} constraint is not contained in stage {j}",
                            j + 1
                        )));
                    }
                }
                Ok(ConstraintSchedule::PerStage(stages))
            }
        }
    }

    pub(crate) fn to_raw(&self) -> RawConstraint {
        match self {
            ConstraintSchedule::Uniform(c) => RawConstraint::Uniform(c.to_raw()),
            ConstraintSchedule::PerStage(v) => {
                RawConstraint::PerStage(v.iter().map(BeliefConstraint::to_raw).collect())
            }
        }
    }

    /// Constraint at stage `k` of the prediction horizon.
    pub fn at(&self, stage: usize) -> &BeliefConstraint {
        match self {
            ConstraintSchedule::Uniform(c) => c,
            ConstraintSchedule::PerStage(v) => &v[stage.min(v.len() - 1)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn satisfaction_uses_safe_mass() {
        let c = BeliefConstraint::new(vec![0, 1], 0.2, 3).unwrap();
        assert!(c.is_satisfied(&Belief::new(vec![0.4, 0.55, 0.05]).unwrap()));
        assert!(!c.is_satisfied(&Belief::new(vec![0.4, 0.35, 0.25]).unwrap()));
        let strict = BeliefConstraint::new(vec![0, 1], 0.0, 3).unwrap();
        assert!(!strict.is_satisfied(&Belief::new(vec![0.0, 0.9, 0.1]).unwrap()));
        assert!(strict.is_satisfied(&Belief::new(vec![0.75, 0.25, 0.0]).unwrap()));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(BeliefConstraint::new(vec![0], 1.0, 3).is_err());
        assert!(BeliefConstraint::new(vec![3], 0.1, 3).is_err());
    }

    #[test]
    fn nesting_is_checked() {
        let raw = |s: Vec<usize>, e: f64| RawStageConstraint {
            safe_states: s,
            epsilon: e,
        };
        let ok = RawConstraint::PerStage(vec![
            raw(vec![0, 1], 0.2),
            raw(vec![0, 1], 0.1),
            raw(vec![0], 0.1),
        ]);
        assert!(ConstraintSchedule::from_raw(&ok, 3, 2).is_ok());
        let widening = RawConstraint::PerStage(vec![
            raw(vec![0], 0.2),
            raw(vec![0, 1], 0.1),
            raw(vec![0], 0.1),
        ]);
        assert!(ConstraintSchedule::from_raw(&widening, 3, 2).is_err());
        let loosening = RawConstraint::PerStage(vec![
            raw(vec![0], 0.1),
            raw(vec![0], 0.2),
            raw(vec![0], 0.2),
        ]);
        assert!(ConstraintSchedule::from_raw(&loosening, 3, 2).is_err());
        assert!(ConstraintSchedule::from_raw(&ok, 3, 3).is_err());
    }
}
