use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::alpha::ValueStage;
use super::backup::backup;
use super::{SolveError, SolverOptions};
use crate::model::{Belief, PomdpModel};

/// Offline solution: the value function at every stage `0..=N`.
///
/// `stages[k]` is the value with `N − k` steps to go, so `stages[0]` is the
/// design value `V_0` and `stages[1]` equals `V_0` of the `(N−1)`-horizon
/// problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyArtifact {
    pub fingerprint: String,
    pub discount: f64,
    pub horizon: usize,
    pub stages: Vec<ValueStage>,
}

/// Solves the unconstrained finite-horizon problem backwards from `c_N`.
pub fn solve(model: &PomdpModel, opts: &SolverOptions) -> Result<PolicyArtifact, SolveError> {
    if model.constraint().is_some() {
        return Err(SolveError::Constrained);
    }
    let mut stages = vec![ValueStage::terminal(model)];
    for _ in 0..model.horizon() {
        let next = backup(stages.last().expect("non-empty"), model, opts)?;
        stages.push(next);
    }
    stages.reverse();
    Ok(PolicyArtifact {
        fingerprint: model.fingerprint(),
        discount: model.discount(),
        horizon: model.horizon(),
        stages,
    })
}

impl PolicyArtifact {
    pub fn stage(&self, k: usize) -> Result<&ValueStage, SolveError> {
        self.stages.get(k).ok_or(SolveError::StageOutOfRange {
            stage: k,
            horizon: self.horizon,
        })
    }

    /// Value and minimizing action at stage `k`. Stage `N` has no action.
    pub fn evaluate(&self, k: usize, belief: &Belief) -> Result<(f64, Option<usize>), SolveError> {
        let stage = self.stage(k)?;
        let n = stage.vectors[0].gamma.len();
        if belief.len() != n {
            return Err(SolveError::Dimension {
                expected: n,
                found: belief.len(),
            });
        }
        Ok(stage.best(belief))
    }

    /// Design value `V_0(π)`.
    pub fn value(&self, belief: &Belief) -> Result<f64, SolveError> {
        Ok(self.evaluate(0, belief)?.0)
    }

    /// Receding-horizon action `g_0*(π)`; `None` only for a zero horizon.
    pub fn greedy_action(&self, belief: &Belief) -> Result<Option<usize>, SolveError> {
        Ok(self.evaluate(0, belief)?.1)
    }

    pub fn check_model(&self, model: &PomdpModel) -> Result<(), SolveError> {
        let fp = model.fingerprint();
        if fp != self.fingerprint {
            return Err(SolveError::FingerprintMismatch {
                artifact: self.fingerprint.clone(),
                model: fp,
            });
        }
        Ok(())
    }

    pub fn n_states(&self) -> usize {
        self.stages[0].vectors[0].gamma.len()
    }
}

pub fn save_artifact(artifact: &PolicyArtifact, path: impl AsRef<Path>) -> Result<(), SolveError> {
    fs::write(path, serde_json::to_string(artifact)?)?;
    Ok(())
}

pub fn load_artifact(path: impl AsRef<Path>) -> Result<PolicyArtifact, SolveError> {
    let artifact: PolicyArtifact = serde_json::from_str(&fs::read_to_string(path)?)?;
    if artifact.stages.len() != artifact.horizon + 1
        || artifact.stages.iter().any(|s| s.vectors.is_empty())
    {
        return Err(SolveError::StageOutOfRange {
            stage: artifact.stages.len(),
            horizon: artifact.horizon,
        });
    }
    Ok(artifact)
}
