//! Information-state recursion for finite POMDPs.
//!
//! Time update: `π_{k+1|k} = π_k P(a)`.
//! Measurement update for observation `θ`:
//!
//! ```text
//! π_{k+1, j} = Σ_i π_{k,i} p^a_{ij} r^a_{jθ} / Σ_{i,j} π_{k,i} p^a_{ij} r^a_{jθ}
//! ```
//!
//! The denominator is the observation likelihood `P(y_{k+1} = θ | π_k, a)`.
//! All sums run over states in index order.

use thiserror::Error;

use crate::model::{Belief, PomdpModel};

/// Normalizers at or below this are treated as impossible observations.
pub const MIN_LIKELIHOOD: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FilterError {
    #[error("action {action} out of range ({n_actions} actions)")]
    ActionOutOfRange { action: usize, n_actions: usize },
    #[error("observation {observation} out of range ({n_observations} observations)")]
    ObservationOutOfRange {
        observation: usize,
        n_observations: usize,
    },
    #[error("belief has {found} entries but the model has {expected} states")]
    Dimension { expected: usize, found: usize },
    #[error("observation {observation} has likelihood {likelihood:e} under the current belief")]
    ZeroLikelihood { observation: usize, likelihood: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeliefUpdateResult {
    pub posterior: Belief,
    pub likelihood: f64,
    pub predicted: Belief,
}

fn check(belief: &Belief, action: usize, model: &PomdpModel) -> Result<(), FilterError> {
    if belief.len() != model.n_states() {
        return Err(FilterError::Dimension {
            expected: model.n_states(),
            found: belief.len(),
        });
    }
    if action >= model.n_actions() {
        return Err(FilterError::ActionOutOfRange {
            action,
            n_actions: model.n_actions(),
        });
    }
    Ok(())
}

/// Unnormalized `π·P(a)`.
fn propagate(belief: &Belief, action: usize, model: &PomdpModel) -> Vec<f64> {
    let p = model.transition(action);
    let n = model.n_states();
    let mut out = vec![0.0; n];
    for (i, &pi) in belief.as_slice().iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        for (o, &pij) in out.iter_mut().zip(p.row(i)) {
            *o += pi * pij;
        }
    }
    out
}

/// One-step prediction `π·P(a)`.
pub fn predict(belief: &Belief, action: usize, model: &PomdpModel) -> Result<Belief, FilterError> {
    check(belief, action, model)?;
    Ok(Belief::new(propagate(belief, action, model)).expect("stochastic rows preserve mass"))
}

fn posterior_from_prediction(
    predicted: &[f64],
    action: usize,
    observation: usize,
    model: &PomdpModel,
) -> Result<(Belief, f64), FilterError> {
    let r = model.observation(action);
    let joint: Vec<f64> = predicted
        .iter()
        .enumerate()
        .map(|(j, &pj)| pj * r.get(j, observation))
        .collect();
    let likelihood: f64 = joint.iter().sum();
    if likelihood <= MIN_LIKELIHOOD {
        return Err(FilterError::ZeroLikelihood {
            observation,
            likelihood,
        });
    }
    let posterior = Belief::new(joint).expect("positive mass");
    Ok((posterior, likelihood))
}

/// Full Bayes update after applying `action` and observing `observation`.
pub fn update(
    belief: &Belief,
    action: usize,
    observation: usize,
    model: &PomdpModel,
) -> Result<BeliefUpdateResult, FilterError> {
    check(belief, action, model)?;
    if observation >= model.n_observations() {
        return Err(FilterError::ObservationOutOfRange {
            observation,
            n_observations: model.n_observations(),
        });
    }
    let raw = propagate(belief, action, model);
    let (posterior, likelihood) = posterior_from_prediction(&raw, action, observation, model)?;
    Ok(BeliefUpdateResult {
        posterior,
        likelihood,
        predicted: Belief::new(raw).expect("stochastic rows preserve mass"),
    })
}

/// `P(y = θ | π, a)` for every observation `θ`.
pub fn observation_distribution(
    belief: &Belief,
    action: usize,
    model: &PomdpModel,
) -> Result<Vec<f64>, FilterError> {
    check(belief, action, model)?;
    let raw = propagate(belief, action, model);
    let r = model.observation(action);
    Ok((0..model.n_observations())
        .map(|theta| {
            raw.iter()
                .enumerate()
                .map(|(j, &pj)| pj * r.get(j, theta))
                .sum()
        })
        .collect())
}

/// Likelihood and posterior for every observation; impossible observations
/// map to `None`. Used by the tree searches.
pub fn branch(
    belief: &Belief,
    action: usize,
    model: &PomdpModel,
) -> Result<Vec<Option<(f64, Belief)>>, FilterError> {
    check(belief, action, model)?;
    let raw = propagate(belief, action, model);
    Ok((0..model.n_observations())
        .map(|theta| {
            posterior_from_prediction(&raw, action, theta, model)
                .ok()
                .map(|(post, lik)| (lik, post))
        })
        .collect())
}
