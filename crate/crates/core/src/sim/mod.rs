//! Seeded closed-loop Monte Carlo simulation.
//!
//! The ground-truth chain is sampled from the model while the policy only
//! sees observations. Every run draws from its own ChaCha stream (master
//! seed, stream = run index): first `x_0` (when sampled), then per step the
//! next state followed by the observation. Policies compared under the same
//! seed therefore share random numbers.

mod baselines;
mod export;

pub use baselines::CertaintyEquivalent;
pub use export::{trajectory_csv, write_trajectory_csv};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::controller::{Controller, ControllerError};
use crate::filter::{update, FilterError};
use crate::model::{Belief, PomdpModel};
use crate::solver::{PolicyArtifact, SolveError, SolverOptions};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("simulation needs at least one step and one run")]
    Empty,
    #[error("initial state {state} out of range ({n_states} states)")]
    StateOutOfRange { state: usize, n_states: usize },
    #[error("constant action {action} out of range ({n_actions} actions)")]
    ActionOutOfRange { action: usize, n_actions: usize },
    #[error("constraint became infeasible at step {step}")]
    Infeasible { step: usize },
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error(transparent)]
    Filter(#[from] FilterError),
}

/// Decision rule driving a simulated run.
#[derive(Debug, Clone, Copy)]
pub enum Policy<'a> {
    /// Receding-horizon control from an offline artifact.
    Smpc(&'a PolicyArtifact),
    /// Receding-horizon control with a fresh tree search per step
    /// (required for constrained models).
    SmpcOnline(SolverOptions),
    /// Acts on the most likely state as if it were known.
    CertaintyEquivalent(&'a CertaintyEquivalent),
    Constant(usize),
}

impl Policy<'_> {
    pub fn label(&self) -> String {
        match self {
            Policy::Smpc(_) => "smpc".into(),
            Policy::SmpcOnline(_) => "smpc-online".into(),
            Policy::CertaintyEquivalent(_) => "certainty-equivalent".into(),
            Policy::Constant(a) => format!("constant-{a}"),
        }
    }
}

/// How the true initial state is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    #[default]
    SampleFromBelief,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStep {
    pub step: usize,
    pub true_state: usize,
    /// Belief `π_k` on which the action was chosen.
    pub belief: Vec<f64>,
    pub action: usize,
    /// Observation `y_{k+1}` that followed the action.
    pub observation: usize,
    pub stage_cost: f64,
    pub discounted_cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub seed: u64,
    pub run_index: u64,
    pub steps: Vec<TrajectoryStep>,
    pub horizon_simulated: usize,
    pub truncated_discounted_cost: f64,
    pub final_belief: Vec<f64>,
}

enum Agent<'a> {
    Smpc(Controller<'a>),
    Rule {
        model: &'a PomdpModel,
        belief: Belief,
        rule: Box<dyn Fn(&Belief) -> usize + 'a>,
        last: usize,
    },
}

impl<'a> Agent<'a> {
    fn new(model: &'a PomdpModel, policy: &Policy<'a>, pi0: &Belief) -> Result<Self, SimError> {
        Ok(match *policy {
            Policy::Smpc(artifact) => {
                Agent::Smpc(Controller::with_artifact(model, artifact, pi0.clone())?)
            }
            Policy::SmpcOnline(opts) => Agent::Smpc(Controller::online(model, pi0.clone(), &opts)?),
            Policy::CertaintyEquivalent(ce) => Agent::Rule {
                model,
                belief: pi0.clone(),
                rule: Box::new(move |b| ce.action(b)),
                last: 0,
            },
            Policy::Constant(a) => {
                if a >= model.n_actions() {
                    return Err(SimError::ActionOutOfRange {
                        action: a,
                        n_actions: model.n_actions(),
                    });
                }
                Agent::Rule {
                    model,
                    belief: pi0.clone(),
                    rule: Box::new(move |_| a),
                    last: 0,
                }
            }
        })
    }

    fn belief(&self) -> &Belief {
        match self {
            Agent::Smpc(c) => c.belief(),
            Agent::Rule { belief, .. } => belief,
        }
    }

    fn decide(&mut self, step: usize) -> Result<usize, SimError> {
        match self {
            Agent::Smpc(c) => c.decide().map_err(|e| match e {
                ControllerError::Solve(SolveError::Infeasible) => SimError::Infeasible { step },
                other => other.into(),
            }),
            Agent::Rule {
                belief, rule, last, ..
            } => {
                *last = rule(belief);
                Ok(*last)
            }
        }
    }

    fn advance(&mut self, observation: usize, cost: f64) -> Result<(), SimError> {
        match self {
            Agent::Smpc(c) => {
                c.advance(observation, Some(cost))?;
            }
            Agent::Rule {
                model,
                belief,
                last,
                ..
            } => {
                *belief = update(belief, *last, observation, model)?.posterior;
            }
        }
        Ok(())
    }
}

/// Inverse-CDF draw over `row` in index order.
fn sample_index<R: Rng>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cumulative = 0.0;
    for (j, &p) in row.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return j;
        }
    }
    row.iter().rposition(|&p| p > 0.0).unwrap_or(row.len() - 1)
}

fn run_rng(seed: u64, run_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(run_index);
    rng
}

/// One closed-loop run on stream `run_index` of `seed`.
pub fn simulate_run(
    model: &PomdpModel,
    policy: &Policy<'_>,
    pi0: &Belief,
    init: InitialState,
    steps: usize,
    seed: u64,
    run_index: u64,
) -> Result<TrajectoryRecord, SimError> {
    if steps == 0 {
        return Err(SimError::Empty);
    }
    let mut rng = run_rng(seed, run_index);
    let mut agent = Agent::new(model, policy, pi0)?;
    let mut x = match init {
        InitialState::SampleFromBelief => sample_index(pi0.as_slice(), &mut rng),
        InitialState::Fixed(s) if s < model.n_states() => s,
        InitialState::Fixed(s) => {
            return Err(SimError::StateOutOfRange {
                state: s,
                n_states: model.n_states(),
            })
        }
    };
    let alpha = model.discount();
    let mut cumulative = 0.0;
    let mut records = Vec::with_capacity(steps);
    for k in 0..steps {
        let belief = agent.belief().as_slice().to_vec();
        let action = agent.decide(k)?;
        let stage_cost = model.cost(action)[x];
        let next = sample_index(model.transition(action).row(x), &mut rng);
        let observation = sample_index(model.observation(action).row(next), &mut rng);
        agent.advance(observation, stage_cost)?;
        cumulative += alpha.powi(k as i32) * stage_cost;
        records.push(TrajectoryStep {
            step: k,
            true_state: x,
            belief,
            action,
            observation,
            stage_cost,
            discounted_cumulative: cumulative,
        });
        x = next;
    }
    Ok(TrajectoryRecord {
        seed,
        run_index,
        steps: records,
        horizon_simulated: steps,
        truncated_discounted_cost: cumulative,
        final_belief: agent.belief().as_slice().to_vec(),
    })
}

/// Single run on stream 0.
pub fn simulate(
    model: &PomdpModel,
    policy: &Policy<'_>,
    pi0: &Belief,
    init: InitialState,
    steps: usize,
    seed: u64,
) -> Result<TrajectoryRecord, SimError> {
    simulate_run(model, policy, pi0, init, steps, seed, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub policy: String,
    pub runs: usize,
    pub steps: usize,
    pub seed: u64,
    pub pi0: Vec<f64>,
    pub mean_cost: f64,
    pub stddev_cost: f64,
    pub min_cost: f64,
    pub max_cost: f64,
    /// `α^M · c_max / (1 − α)`: the most the untruncated tail can add.
    pub tail_bound: f64,
    pub bound: Option<f64>,
    /// Fraction of runs whose truncated cost is at most `bound`.
    pub fraction_within_bound: Option<f64>,
    /// `bound − (mean_cost + tail_bound)`; positive means compliance.
    pub bound_margin: Option<f64>,
    pub action_histogram: Vec<u64>,
}

/// `runs` independent trajectories, run `r` on stream `r` of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn run_batch(
    model: &PomdpModel,
    policy: &Policy<'_>,
    pi0: &Belief,
    init: InitialState,
    runs: usize,
    steps: usize,
    seed: u64,
    bound: Option<f64>,
) -> Result<SimulationSummary, SimError> {
    if runs == 0 || steps == 0 {
        return Err(SimError::Empty);
    }
    let results: Vec<(f64, Vec<u64>)> = (0..runs as u64)
        .into_par_iter()
        .map(|r| {
            let rec = simulate_run(model, policy, pi0, init, steps, seed, r)?;
            let mut hist = vec![0u64; model.n_actions()];
            for s in &rec.steps {
                hist[s.action] += 1;
            }
            Ok((rec.truncated_discounted_cost, hist))
        })
        .collect::<Result<_, SimError>>()?;

    let costs: Vec<f64> = results.iter().map(|(c, _)| *c).collect();
    let mut action_histogram = vec![0u64; model.n_actions()];
    for (_, h) in &results {
        for (t, x) in action_histogram.iter_mut().zip(h) {
            *t += x;
        }
    }
    let n = costs.len() as f64;
    let mean_cost = costs.iter().sum::<f64>() / n;
    let stddev_cost = if costs.len() > 1 {
        (costs.iter().map(|c| (c - mean_cost).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let alpha = model.discount();
    let tail_bound = alpha.powi(steps as i32) * model.max_stage_cost() / (1.0 - alpha);
    Ok(SimulationSummary {
        policy: policy.label(),
        runs,
        steps,
        seed,
        pi0: pi0.as_slice().to_vec(),
        mean_cost,
        stddev_cost,
        min_cost: costs.iter().copied().fold(f64::INFINITY, f64::min),
        max_cost: costs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        tail_bound,
        bound,
        fraction_within_bound: bound.map(|b| costs.iter().filter(|&&c| c <= b).count() as f64 / n),
        bound_margin: bound.map(|b| b - (mean_cost + tail_bound)),
        action_histogram,
    })
}
