//! Direct tree evaluation of the belief-space recursion
//!
//! ```text
//! V_d(π) = min_a { π·c(a) + α Σ_θ P(θ | π, a) V_{d−1}(T(π, θ, a)) },   V_0(π) = π·c_N
//! ```
//!
//! and its constrained variant, where an action is admissible only if every
//! possible successor belief stays in the next stage's constraint set and
//! itself admits a feasible continuation.

use rayon::prelude::*;

use super::alpha::is_tie;
use super::{SolveError, SolverOptions};
use crate::filter::branch;
use crate::model::{Belief, ConstraintSchedule, PomdpModel};

/// Observation branches below this likelihood contribute nothing to values.
pub const NEGLIGIBLE_LIKELIHOOD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub value: f64,
    /// `None` at depth zero, where no decision is taken.
    pub action: Option<usize>,
}

fn check_depth(model: &PomdpModel, depth: usize, opts: &SolverOptions) -> Result<(), SolveError> {
    let leaves = ((model.n_actions() * model.n_observations()) as f64).powi(depth as i32);
    if leaves > opts.max_candidates as f64 {
        return Err(SolveError::DepthCap {
            depth,
            leaves,
            cap: opts.max_candidates,
        });
    }
    Ok(())
}

fn check_belief(model: &PomdpModel, belief: &Belief) -> Result<(), SolveError> {
    if belief.len() != model.n_states() {
        return Err(SolveError::Dimension {
            expected: model.n_states(),
            found: belief.len(),
        });
    }
    Ok(())
}

/// Value of a node with `depth` decisions left at horizon stage `stage`;
/// `None` when no admissible policy exists below it.
fn node_value(
    model: &PomdpModel,
    constraint: Option<&ConstraintSchedule>,
    belief: &Belief,
    stage: usize,
    depth: usize,
) -> Option<f64> {
    if depth == 0 {
        return Some(belief.dot(model.terminal_cost()));
    }
    (0..model.n_actions())
        .filter_map(|a| action_value(model, constraint, belief, a, stage, depth))
        .reduce(f64::min)
}

fn action_value(
    model: &PomdpModel,
    constraint: Option<&ConstraintSchedule>,
    belief: &Belief,
    action: usize,
    stage: usize,
    depth: usize,
) -> Option<f64> {
    let branches = branch(belief, action, model).expect("indices checked at the root");
    let mut continuation = 0.0;
    for (likelihood, posterior) in branches.into_iter().flatten() {
        let negligible = likelihood < NEGLIGIBLE_LIKELIHOOD;
        match constraint {
            None if negligible => continue,
            None => {}
            Some(c) if !c.at(stage + 1).is_satisfied(&posterior) => return None,
            Some(_) => {}
        }
        let sub = node_value(model, constraint, &posterior, stage + 1, depth - 1)?;
        if !negligible {
            continuation += likelihood * sub;
        }
    }
    Some(belief.dot(model.cost(action)) + model.discount() * continuation)
}

/// Lowest-index action among those tied for the minimum.
fn pick(values: &[Option<f64>]) -> Option<Decision> {
    let best = values.iter().flatten().copied().reduce(f64::min)?;
    let action = values
        .iter()
        .position(|v| v.is_some_and(|v| is_tie(v, best)))
        .expect("minimum is attained");
    Some(Decision {
        value: best,
        action: Some(action),
    })
}

/// Q-values of every root action under the unconstrained recursion.
pub fn oracle_action_values(
    model: &PomdpModel,
    belief: &Belief,
    depth: usize,
    opts: &SolverOptions,
) -> Result<Vec<f64>, SolveError> {
    check_belief(model, belief)?;
    check_depth(model, depth, opts)?;
    if depth == 0 {
        return Ok(Vec::new());
    }
    Ok((0..model.n_actions())
        .into_par_iter()
        .map(|a| action_value(model, None, belief, a, 0, depth).expect("unconstrained"))
        .collect())
}

/// Brute-force evaluation of the `depth`-step problem at `belief`.
pub fn expectimax_oracle(
    model: &PomdpModel,
    belief: &Belief,
    depth: usize,
    opts: &SolverOptions,
) -> Result<Decision, SolveError> {
    if depth == 0 {
        check_belief(model, belief)?;
        return Ok(Decision {
            value: belief.dot(model.terminal_cost()),
            action: None,
        });
    }
    let q: Vec<Option<f64>> = oracle_action_values(model, belief, depth, opts)?
        .into_iter()
        .map(Some)
        .collect();
    Ok(pick(&q).expect("at least one action"))
}

/// Root Q-values over the model horizon with the model's constraints;
/// `None` marks inadmissible actions.
pub fn online_action_values(
    model: &PomdpModel,
    belief: &Belief,
    opts: &SolverOptions,
) -> Result<Vec<Option<f64>>, SolveError> {
    check_belief(model, belief)?;
    let depth = model.horizon();
    check_depth(model, depth, opts)?;
    let constraint = model.constraint();
    if let Some(c) = constraint {
        let c0 = c.at(0);
        if !c0.is_satisfied(belief) {
            return Err(SolveError::InfeasibleBelief {
                safe_mass: c0.safe_mass(belief),
                required: 1.0 - c0.epsilon(),
            });
        }
    }
    if depth == 0 {
        return Ok(Vec::new());
    }
    Ok((0..model.n_actions())
        .into_par_iter()
        .map(|a| action_value(model, constraint, belief, a, 0, depth))
        .collect())
}

/// Receding-horizon decision for a possibly constrained model, searched
/// from scratch at `belief`.
pub fn solve_online(
    model: &PomdpModel,
    belief: &Belief,
    opts: &SolverOptions,
) -> Result<Decision, SolveError> {
    let q = online_action_values(model, belief, opts)?;
    if model.horizon() == 0 {
        return Ok(Decision {
            value: belief.dot(model.terminal_cost()),
            action: None,
        });
    }
    pick(&q).ok_or(SolveError::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::update;
    use crate::model::{builtin_healthcare_model, RawConstraint};

    fn constrained(safe: &str, eps: f64) -> PomdpModel {
        let c: RawConstraint =
            serde_json::from_str(&format!(r#"{{"safe_states":{safe},"epsilon":{eps}}}"#)).unwrap();
        builtin_healthcare_model().with_constraint(Some(c)).unwrap()
    }

    #[test]
    fn depth_one_at_stage3() {
        let m = builtin_healthcare_model();
        let d = expectimax_oracle(&m, &Belief::vertex(3, 2), 1, &SolverOptions::default()).unwrap();
        assert_eq!(d.action, Some(1));
        assert!((d.value - 52.0).abs() < 1e-12);
    }

    #[test]
    fn depth_zero_is_terminal() {
        let m = builtin_healthcare_model();
        let b = Belief::new(vec![0.2, 0.3, 0.5]).unwrap();
        let d = expectimax_oracle(&m, &b, 0, &SolverOptions::default()).unwrap();
        assert_eq!(d.action, None);
        assert_eq!(d.value, b.dot(&[0.0, 8.0, 60.0]));
    }

    #[test]
    fn depth_cap() {
        let m = builtin_healthcare_model();
        let opts = SolverOptions {
            max_candidates: 1000,
            ..Default::default()
        };
        assert!(matches!(
            expectimax_oracle(&m, &Belief::uniform(3), 3, &opts),
            Err(SolveError::DepthCap { .. })
        ));
    }

    #[test]
    fn unconstrained_online_matches_oracle() {
        let m = builtin_healthcare_model();
        let opts = SolverOptions::default();
        for b in [
            Belief::uniform(3),
            Belief::vertex(3, 1),
            Belief::new(vec![0.6, 0.3, 0.1]).unwrap(),
        ] {
            let a = solve_online(&m, &b, &opts).unwrap();
            let o = expectimax_oracle(&m, &b, m.horizon(), &opts).unwrap();
            assert_eq!(a, o);
        }
    }

    #[test]
    fn skip_admissible_with_slack() {
        let m = constrained("[0,1]", 0.2);
        let b = Belief::new(vec![0.5, 0.5, 0.0]).unwrap();
        let succ = update(&b, 0, 0, &m).unwrap().posterior;
        assert!((succ.as_slice()[0] - 0.4).abs() < 1e-15);
        assert!((succ.as_slice()[1] - 0.55).abs() < 1e-15);
        assert!((succ.as_slice()[2] - 0.05).abs() < 1e-15);
        let q = online_action_values(&m, &b, &SolverOptions::default()).unwrap();
        assert!(q[0].is_some());
    }

    #[test]
    fn zero_tolerance_forbids_leaking_actions() {
        let m = constrained("[0,1]", 0.0);
        let b = Belief::vertex(3, 1);
        let q = online_action_values(&m, &b, &SolverOptions::default()).unwrap();
        assert!(q[0].is_none() && q[1].is_none());
        assert!(q[2].is_some() && q[3].is_some());
        let d = solve_online(&m, &b, &SolverOptions::default()).unwrap();
        assert!(matches!(d.action, Some(2) | Some(3)));
    }

    #[test]
    fn infeasible_start() {
        let m = constrained("[0,1]", 0.0);
        assert!(matches!(
            solve_online(&m, &Belief::vertex(3, 2), &SolverOptions::default()),
            Err(SolveError::InfeasibleBelief { .. })
        ));
    }

    #[test]
    fn infeasible_when_no_action_can_hold_the_set() {
        // Only stage 1 is safe; from stage 2 every action keeps some mass outside.
        let m = constrained("[0]", 0.0);
        // Stage 1 itself leaks to stage 2 under every action except the test.
        let d = solve_online(&m, &Belief::vertex(3, 0), &SolverOptions::default()).unwrap();
        assert_eq!(d.action, Some(2));
        let m = constrained("[2]", 0.0);
        // Stage 3 is absorbing, so staying there is always feasible.
        assert!(solve_online(&m, &Belief::vertex(3, 2), &SolverOptions::default()).is_ok());
        let per_stage: RawConstraint = serde_json::from_str(
            r#"[{"safe_states":[0,1],"epsilon":0.5},{"safe_states":[0],"epsilon":0.0},
                {"safe_states":[0],"epsilon":0.0},{"safe_states":[0],"epsilon":0.0},
                {"safe_states":[0],"epsilon":0.0}]"#,
        )
        .unwrap();
        let m = builtin_healthcare_model()
            .with_constraint(Some(per_stage))
            .unwrap();
        // Half the mass in stage 2 can never be moved entirely to stage 1 in one step.
        let b = Belief::new(vec![0.5, 0.5, 0.0]).unwrap();
        assert!(matches!(
            solve_online(&m, &b, &SolverOptions::default()),
            Err(SolveError::Infeasible)
        ));
    }
}
