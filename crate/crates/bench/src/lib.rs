//! Shared fixtures for the criterion benchmarks.

use smpc_core::model::{builtin_healthcare_model, PomdpModel, RawConstraint, RawStageConstraint};
use smpc_core::{solve, PolicyArtifact, SolverOptions};

pub fn healthcare() -> PomdpModel {
    builtin_healthcare_model()
}

pub fn healthcare_with_horizon(n: usize) -> PomdpModel {
    builtin_healthcare_model()
        .with_overrides(Some(n), None, None)
        .expect("valid horizon")
}

/// Healthcare model restricted to stages 2 and 3 with zero violation budget.
pub fn constrained_healthcare() -> PomdpModel {
    builtin_healthcare_model()
        .with_constraint(Some(RawConstraint::Uniform(RawStageConstraint {
            safe_states: vec![1, 2],
            epsilon: 0.0,
        })))
        .expect("valid constraint")
}

pub fn healthcare_artifact() -> PolicyArtifact {
    solve(&healthcare(), &SolverOptions::default()).expect("healthcare solves")
}
