use crate::model::{Belief, PomdpModel};
use crate::solver::is_tie;

/// Certainty-equivalent rule: solve the fully observed `N`-horizon MDP and
/// apply its first-stage action at the most likely state.
#[derive(Debug, Clone, PartialEq)]
pub struct CertaintyEquivalent {
    actions: Vec<usize>,
    values: Vec<f64>,
}

impl CertaintyEquivalent {
    pub fn new(model: &PomdpModel) -> Self {
        let n = model.n_states();
        let alpha = model.discount();
        let mut values = model.terminal_cost().to_vec();
        let mut actions = vec![0; n];
        for _ in 0..model.horizon() {
            let mut next = vec![f64::INFINITY; n];
            for i in 0..n {
                for a in 0..model.n_actions() {
                    let p = model.transition(a).row(i);
                    let q = model.cost(a)[i]
                        + alpha * p.iter().zip(&values).map(|(p, v)| p * v).sum::<f64>();
                    if a == 0 || !is_tie(next[i], q) {
                        next[i] = q;
                        actions[i] = a;
                    }
                }
            }
            values = next;
        }
        CertaintyEquivalent { actions, values }
    }

    /// First-stage action per state.
    pub fn state_actions(&self) -> &[usize] {
        &self.actions
    }

    /// Full-information `N`-horizon value per state.
    pub fn state_values(&self) -> &[f64] {
        &self.values
    }

    pub fn action(&self, belief: &Belief) -> usize {
        self.actions[belief.argmax()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::builtin_healthcare_model;

    #[test]
    fn healthcare_full_information_actions() {
        let ce = CertaintyEquivalent::new(&builtin_healthcare_model());
        assert_eq!(ce.state_actions(), &[0, 3, 1]);
        assert_eq!(ce.action(&Belief::new(vec![0.2, 0.5, 0.3]).unwrap()), 3);
    }

    #[test]
    fn zero_horizon_defaults_to_first_action() {
        let m = builtin_healthcare_model()
            .with_overrides(Some(0), None, None)
            .unwrap();
        let ce = CertaintyEquivalent::new(&m);
        assert_eq!(ce.state_values(), m.terminal_cost());
    }
}
