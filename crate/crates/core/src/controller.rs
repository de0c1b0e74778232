//! The receding-horizon loop: decide `u_k = g_0*(π_k)`, then fold in the
//! next observation.
//!
//! The controller never sees the true state. Realized costs are reported by
//! whoever drives it (a simulator, a replay, a test).

use std::borrow::Cow;

use thiserror::Error;

use crate::filter::{update, FilterError};
use crate::model::{Belief, PomdpModel};
use crate::solver::{solve, solve_online, PolicyArtifact, SolveError, SolverOptions};

#[derive(Debug, Error)]
pub enum ControllerError {
    #[error("initial belief has {found} entries but the model has {expected} states")]
    Dimension { expected: usize, found: usize },
    #[error("initial belief violates the stage-0 constraint (safe mass {safe_mass}, required {required})")]
    Infeasible { safe_mass: f64, required: f64 },
    #[error("horizon 0 leaves no decision to take")]
    ZeroHorizon,
    #[error("advance called before decide at step {0}")]
    MissingAction(usize),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

#[derive(Debug, Clone)]
enum Mode<'a> {
    Offline(Cow<'a, PolicyArtifact>),
    Online(SolverOptions),
}

/// A running SMPC controller: current information state, step counter and
/// discounted cost so far.
#[derive(Debug, Clone)]
pub struct Controller<'a> {
    model: &'a PomdpModel,
    mode: Mode<'a>,
    belief: Belief,
    step: usize,
    discounted_cost: f64,
    last_action: Option<usize>,
}

impl<'a> Controller<'a> {
    /// Solves offline (or arms the online solver for constrained models).
    pub fn initialize(
        model: &'a PomdpModel,
        initial_belief: Belief,
        opts: &SolverOptions,
    ) -> Result<Self, ControllerError> {
        let mode = if model.constraint().is_some() {
            Mode::Online(*opts)
        } else {
            Self::check_horizon(model)?;
            Mode::Offline(Cow::Owned(solve(model, opts)?))
        };
        Self::start(model, mode, initial_belief)
    }

    /// Uses an already solved artifact; it must belong to `model`.
    pub fn with_artifact(
        model: &'a PomdpModel,
        artifact: &'a PolicyArtifact,
        initial_belief: Belief,
    ) -> Result<Self, ControllerError> {
        artifact.check_model(model)?;
        Self::check_horizon(model)?;
        Self::start(
            model,
            Mode::Offline(Cow::Borrowed(artifact)),
            initial_belief,
        )
    }

    /// Constrained (or explicitly online) operation with a fresh tree search
    /// per decision.
    pub fn online(
        model: &'a PomdpModel,
        initial_belief: Belief,
        opts: &SolverOptions,
    ) -> Result<Self, ControllerError> {
        Self::start(model, Mode::Online(*opts), initial_belief)
    }

    fn check_horizon(model: &PomdpModel) -> Result<(), ControllerError> {
        if model.horizon() == 0 {
            return Err(ControllerError::ZeroHorizon);
        }
        Ok(())
    }

    fn start(
        model: &'a PomdpModel,
        mode: Mode<'a>,
        belief: Belief,
    ) -> Result<Self, ControllerError> {
        if belief.len() != model.n_states() {
            return Err(ControllerError::Dimension {
                expected: model.n_states(),
                found: belief.len(),
            });
        }
        Self::check_horizon(model)?;
        if let Some(c) = model.constraint() {
            let c0 = c.at(0);
            if !c0.is_satisfied(&belief) {
                return Err(ControllerError::Infeasible {
                    safe_mass: c0.safe_mass(&belief),
                    required: 1.0 - c0.epsilon(),
                });
            }
        }
        Ok(Controller {
            model,
            mode,
            belief,
            step: 0,
            discounted_cost: 0.0,
            last_action: None,
        })
    }

    /// `g_0*(π_k)`. Depends on the belief only, never on the step.
    pub fn decide(&mut self) -> Result<usize, ControllerError> {
        let action = match &self.mode {
            Mode::Offline(artifact) => artifact.greedy_action(&self.belief)?,
            Mode::Online(opts) => solve_online(self.model, &self.belief, opts)?.action,
        }
        .ok_or(ControllerError::ZeroHorizon)?;
        self.last_action = Some(action);
        Ok(action)
    }

    /// Bayes update with the observation that followed the last decision.
    pub fn advance(
        &mut self,
        observation: usize,
        realized_cost: Option<f64>,
    ) -> Result<&Belief, ControllerError> {
        let action = self
            .last_action
            .ok_or(ControllerError::MissingAction(self.step))?;
        let next = update(&self.belief, action, observation, self.model)?.posterior;
        if let Some(c) = realized_cost {
            self.discounted_cost += self.model.discount().powi(self.step as i32) * c;
        }
        self.belief = next;
        self.step += 1;
        self.last_action = None;
        Ok(&self.belief)
    }

    pub fn belief(&self) -> &Belief {
        &self.belief
    }

    pub fn step(&self) -> usize {
        self.step
    }

    pub fn discounted_cost(&self) -> f64 {
        self.discounted_cost
    }

    pub fn last_action(&self) -> Option<usize> {
        self.last_action
    }

    pub fn model(&self) -> &PomdpModel {
        self.model
    }

    pub fn is_online(&self) -> bool {
        matches!(self.mode, Mode::Online(_))
    }

    /// The offline artifact, when running offline.
    pub fn artifact(&self) -> Option<&PolicyArtifact> {
        match &self.mode {
            Mode::Offline(a) => Some(a),
            Mode::Online(_) => None,
        }
    }
}
