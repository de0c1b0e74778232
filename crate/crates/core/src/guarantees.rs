//! Numerical certificates for the infinite-horizon performance bound
//!
//! ```text
//! J_∞(π, g^MPC) ≤ J_N(π, g*^{N−1}) + α/(1−α) · η
//! ```
//!
//! where `η` satisfies the terminal-policy condition
//! `α E[π_1 c_N] ≤ E[π_0 c_N − π_0 c(g̃(π_0))] + η / α^{N−1}` for every `π_0`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::branch;
use crate::model::{Belief, PomdpModel};
use crate::solver::{PolicyArtifact, SolveError, NEGLIGIBLE_LIKELIHOOD};

/// Gap violations are flagged only beyond this slack.
pub const MONOTONICITY_SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GuaranteeError {
    #[error("terminal action {action} out of range ({n_actions} actions)")]
    ActionOutOfRange { action: usize, n_actions: usize },
    #[error("artifact horizon {0} has no V_1; need N >= 1")]
    HorizonTooShort(usize),
    #[error("eta must be finite and non-negative (got {0})")]
    BadEta(f64),
    #[error("model carries belief constraints; descent check needs the unconstrained artifact")]
    Constrained,
    #[error(transparent)]
    Solve(#[from] SolveError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaCertificate {
    pub terminal_action: usize,
    /// Worst single transition under the terminal action.
    pub eta_pathwise: f64,
    /// Exact supremum of the expected condition over the simplex.
    pub eta_expected: f64,
    /// `(from, to)` state pair attaining the pathwise maximum.
    pub worst_transition: (usize, usize),
    /// Vertex attaining the expected maximum.
    pub worst_vertex: usize,
}

/// `η` for the constant terminal policy `g̃ ≡ terminal_action`.
///
/// Both quantities are scaled by `α^{N−1}` and clamped at zero. The expected
/// version is linear in `π_0`, so its supremum sits at a vertex.
pub fn compute_eta(
    model: &PomdpModel,
    terminal_action: usize,
) -> Result<EtaCertificate, GuaranteeError> {
    if terminal_action >= model.n_actions() {
        return Err(GuaranteeError::ActionOutOfRange {
            action: terminal_action,
            n_actions: model.n_actions(),
        });
    }
    let alpha = model.discount();
    let scale = alpha.powi(model.horizon() as i32 - 1);
    let c_n = model.terminal_cost();
    let c = model.cost(terminal_action);
    let p = model.transition(terminal_action);
    let n = model.n_states();

    let mut pathwise = f64::NEG_INFINITY;
    let mut worst_transition = (0, 0);
    let mut expected = f64::NEG_INFINITY;
    let mut worst_vertex = 0;
    for i in 0..n {
        let drift: f64 = p.row(i).iter().zip(c_n).map(|(pij, cj)| pij * cj).sum();
        let e = alpha * drift - c_n[i] + c[i];
        if e > expected {
            expected = e;
            worst_vertex = i;
        }
        for (j, &pij) in p.row(i).iter().enumerate() {
            if pij > 0.0 {
                let w = alpha * c_n[j] - c_n[i] + c[i];
                if w > pathwise {
                    pathwise = w;
                    worst_transition = (i, j);
                }
            }
        }
    }
    Ok(EtaCertificate {
        terminal_action,
        eta_pathwise: scale * pathwise.max(0.0),
        eta_expected: scale * expected.max(0.0),
        worst_transition,
        worst_vertex,
    })
}

/// Sampled `η` for a belief-dependent terminal policy: the maximum of the
/// expected condition over the vertices and `samples` random beliefs. A lower
/// estimate of the true supremum unless the policy is constant.
pub fn estimate_eta_for_policy<F>(model: &PomdpModel, policy: F, samples: usize, seed: u64) -> f64
where
    F: Fn(&Belief) -> usize,
{
    let alpha = model.discount();
    let scale = alpha.powi(model.horizon() as i32 - 1);
    let c_n = model.terminal_cost();
    let n = model.n_states();
    let excess = |b: &Belief| {
        let a = policy(b);
        let p = model.transition(a);
        let next: f64 = (0..n)
            .map(|i| b.as_slice()[i] * p.row(i).iter().zip(c_n).map(|(x, y)| x * y).sum::<f64>())
            .sum();
        alpha * next - b.dot(c_n) + b.dot(model.cost(a))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let worst = (0..n)
        .map(|i| Belief::vertex(n, i))
        .chain((0..samples).map(|_| Belief::sample_uniform(n, &mut rng)))
        .map(|b| excess(&b))
        .fold(f64::NEG_INFINITY, f64::max);
    scale * worst.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerformanceBound {
    pub design_cost: f64,
    pub eta: f64,
    pub discount: f64,
    pub bound: f64,
    pub pi0: Belief,
}

/// `design_cost + α/(1−α) · η`.
pub fn bound_from(design_cost: f64, discount: f64, eta: f64) -> f64 {
    design_cost + discount / (1.0 - discount) * eta
}

pub fn compute_bound(
    model: &PomdpModel,
    artifact: &PolicyArtifact,
    pi0: &Belief,
    eta: f64,
) -> Result<PerformanceBound, GuaranteeError> {
    if !eta.is_finite() || eta < 0.0 {
        return Err(GuaranteeError::BadEta(eta));
    }
    let design_cost = artifact.value(pi0)?;
    Ok(PerformanceBound {
        design_cost,
        eta,
        discount: model.discount(),
        bound: bound_from(design_cost, model.discount(), eta),
        pi0: pi0.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    /// Largest observed `V_0(π) − V_1(π)`.
    pub max_gap: f64,
    pub worst_belief: Belief,
    pub beliefs_checked: usize,
    pub eta: f64,
    pub violation: bool,
}

/// Checks `V_0(π) − V_1(π) ≤ η` at every vertex and at `samples` uniform
/// random beliefs drawn from a fixed-seed stream.
pub fn check_value_monotonicity(
    artifact: &PolicyArtifact,
    eta: f64,
    samples: usize,
    seed: u64,
) -> Result<MonotonicityReport, GuaranteeError> {
    if artifact.horizon == 0 || artifact.stages.len() < 2 {
        return Err(GuaranteeError::HorizonTooShort(artifact.horizon));
    }
    let n = artifact.n_states();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let beliefs: Vec<Belief> = (0..n)
        .map(|i| Belief::vertex(n, i))
        .chain((0..samples).map(|_| Belief::sample_uniform(n, &mut rng)))
        .collect();
    let v0 = &artifact.stages[0];
    let v1 = &artifact.stages[1];
    let gaps: Vec<f64> = beliefs
        .par_iter()
        .map(|b| v0.value(b) - v1.value(b))
        .collect();
    let (worst, max_gap) =
        gaps.iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, g)| if g > acc.1 { (i, g) } else { acc },
            );
    Ok(MonotonicityReport {
        max_gap,
        worst_belief: beliefs[worst].clone(),
        beliefs_checked: beliefs.len(),
        eta,
        violation: max_gap > eta + MONOTONICITY_SLACK,
    })
}

/// Descent residual
/// `π·c(g_0*(π)) + α Σ_θ P(θ | π, g_0*(π)) V_0(T(π, θ, g_0*(π))) − V_0(π) − αη`,
/// which should be non-positive.
pub fn check_descent(
    model: &PomdpModel,
    artifact: &PolicyArtifact,
    belief: &Belief,
    eta: f64,
) -> Result<f64, GuaranteeError> {
    if model.constraint().is_some() {
        return Err(GuaranteeError::Constrained);
    }
    artifact.check_model(model)?;
    let (v0, action) = artifact.evaluate(0, belief)?;
    let action = action.ok_or(GuaranteeError::HorizonTooShort(artifact.horizon))?;
    let alpha = model.discount();
    let mut continuation = 0.0;
    for (likelihood, posterior) in branch(belief, action, model)
        .map_err(SolveError::from)?
        .into_iter()
        .flatten()
    {
        if likelihood >= NEGLIGIBLE_LIKELIHOOD {
            continuation += likelihood * artifact.stages[0].value(&posterior);
        }
    }
    Ok(belief.dot(model.cost(action)) + alpha * continuation - v0 - alpha * eta)
}

/// Machine-readable summary written by `certify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub eta_pathwise: f64,
    pub eta_expected: f64,
    pub terminal_action: usize,
    pub design_cost: f64,
    pub pi0: Belief,
    pub bound: f64,
    pub alpha: f64,
    pub horizon: usize,
    pub monotonicity_max_gap: f64,
    pub violation: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_healthcare_model, validate_model, RawAction, RawModel};
    use crate::solver::{solve, SolverOptions};

    #[test]
    fn healthcare_eta_values() {
        let m = builtin_healthcare_model();
        let cert = compute_eta(&m, 3).unwrap();
        let a3 = 0.85f64.powi(3);
        assert!((cert.eta_pathwise - a3 * (0.85 * 8.0 + 4.0)).abs() < 1e-12);
        assert!((cert.eta_pathwise - 6.63255).abs() < 1e-9);
        assert_eq!(cert.worst_transition, (0, 1));
        assert!((cert.eta_expected - a3 * (0.85 * 1.6 + 4.0)).abs() < 1e-12);
        assert_eq!(cert.worst_vertex, 0);
        assert_eq!(cert.eta_pathwise.round(), 7.0);
    }

    #[test]
    fn zero_costs_give_zero_eta() {
        let mut raw = builtin_healthcare_model().to_raw();
        raw.terminal_cost = vec![0.0; 3];
        raw.actions[3].cost = vec![0.0; 3];
        let m = validate_model(&raw).unwrap();
        let cert = compute_eta(&m, 3).unwrap();
        assert_eq!((cert.eta_pathwise, cert.eta_expected), (0.0, 0.0));
    }

    #[test]
    fn eta_action_range() {
        assert!(matches!(
            compute_eta(&builtin_healthcare_model(), 4),
            Err(GuaranteeError::ActionOutOfRange { .. })
        ));
    }

    #[test]
    fn constant_policy_estimate_matches_vertex_formula() {
        let m = builtin_healthcare_model();
        let est = estimate_eta_for_policy(&m, |_| 3, 200, 1);
        assert!((est - compute_eta(&m, 3).unwrap().eta_expected).abs() < 1e-12);
    }

    #[test]
    fn reported_bound_arithmetic() {
        let b = bound_from(8.5, 0.85, 7.0);
        assert!((b - 48.166666666666664).abs() < 1e-12);
        assert!((b - 48.2).abs() < 0.05);
        assert_eq!(bound_from(3.0, 0.85, 0.0), 3.0);
    }

    #[test]
    fn horizon_zero_monotonicity_is_rejected() {
        let m = builtin_healthcare_model()
            .with_overrides(Some(0), None, None)
            .unwrap();
        let art = solve(&m, &SolverOptions::default()).unwrap();
        assert!(matches!(
            check_value_monotonicity(&art, 1.0, 10, 0),
            Err(GuaranteeError::HorizonTooShort(0))
        ));
    }

    #[test]
    fn zero_cost_model_has_zero_gap() {
        let mut raw = builtin_healthcare_model().to_raw();
        raw.terminal_cost = vec![0.0; 3];
        for a in &mut raw.actions {
            a.cost = vec![0.0; 3];
        }
        let m = validate_model(&raw).unwrap();
        let art = solve(&m, &SolverOptions::default()).unwrap();
        let r = check_value_monotonicity(&art, 0.0, 500, 2).unwrap();
        assert_eq!(r.max_gap, 0.0);
        assert!(!r.violation);
    }

    #[test]
    fn healthcare_monotonicity_and_descent() {
        let m = builtin_healthcare_model();
        let art = solve(&m, &SolverOptions::default()).unwrap();
        let eta = compute_eta(&m, 3).unwrap().eta_pathwise;
        let r = check_value_monotonicity(&art, eta, 2000, 9).unwrap();
        assert!(!r.violation, "{r:?}");
        for b in [Belief::uniform(3), Belief::vertex(3, 2)] {
            assert!(check_descent(&m, &art, &b, eta).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn single_action_fixed_point_is_tight() {
        // With one action the value is linear; choosing c_N as the fixed point
        // of c + αP c_N makes the one-step recursion exact.
        let p = [[0.7, 0.3], [0.4, 0.6]];
        let c = [1.0, 3.0];
        let alpha = 0.8;
        // Solve (I − αP) x = c.
        let a = [
            [1.0 - alpha * p[0][0], -alpha * p[0][1]],
            [-alpha * p[1][0], 1.0 - alpha * p[1][1]],
        ];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let x = [
            (c[0] * a[1][1] - a[0][1] * c[1]) / det,
            (a[0][0] * c[1] - a[1][0] * c[0]) / det,
        ];
        let raw = RawModel {
            name: "fixed".into(),
            states: vec!["a".into(), "b".into()],
            observations: vec!["x".into(), "y".into()],
            discount: alpha,
            horizon: 3,
            initial_belief: None,
            actions: vec![RawAction {
                name: "only".into(),
                transition: p.iter().map(|r| r.to_vec()).collect(),
                observation: vec![vec![0.6, 0.4], vec![0.2, 0.8]],
                cost: c.to_vec(),
            }],
            terminal_cost: x.to_vec(),
            constraint: None,
        };
        let m = validate_model(&raw).unwrap();
        let art = solve(&m, &SolverOptions::default()).unwrap();
        for b in [
            Belief::uniform(2),
            Belief::vertex(2, 0),
            Belief::new(vec![0.2, 0.8]).unwrap(),
        ] {
            let r = check_descent(&m, &art, &b, 0.0).unwrap();
            assert!(r.abs() <= 1e-9, "{r}");
        }
    }

    #[test]
    fn bound_is_monotone_in_eta_and_design_cost() {
        for eta in [0.0, 0.5, 3.0] {
            assert!(bound_from(5.0, 0.85, eta + 0.1) > bound_from(5.0, 0.85, eta));
            assert!(bound_from(5.1, 0.85, eta) > bound_from(5.0, 0.85, eta));
        }
    }
}
