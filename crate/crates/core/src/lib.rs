//! Dual-optimal stochastic model predictive control for finite POMDPs.
//!
//! The pipeline mirrors the receding-horizon loop:
//!
//! * [`model`] holds validated POMDP data and the bundled healthcare example.
//! * [`filter`] propagates the information state (belief).
//! * [`solver`] solves the finite-horizon belief-space dynamic program,
//!   exactly via α-vectors or by tree search.
//! * [`controller`] applies the first optimal policy at every step.
//! * [`guarantees`] certifies the terminal-cost assumption and computes the
//!   infinite-horizon performance bound.
//! * [`sim`] runs seeded closed-loop Monte Carlo experiments.

pub mod controller;
pub mod filter;
pub mod guarantees;
pub mod model;
pub mod sim;
pub mod solver;

pub use controller::{Controller, ControllerError};
pub use filter::{observation_distribution, predict, update, BeliefUpdateResult, FilterError};
pub use model::{builtin_healthcare_model, Belief, BeliefConstraint, ModelError, PomdpModel};
pub use sim::{
    run_batch, simulate, InitialState, Policy, SimError, SimulationSummary, TrajectoryRecord,
};
pub use solver::{solve, PolicyArtifact, SolveError, SolverOptions};
