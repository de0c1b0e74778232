//! Finite-horizon stochastic dynamic programming over beliefs.
//!
//! [`solve`] runs the exact α-vector recursion offline and produces a
//! [`PolicyArtifact`]. [`expectimax_oracle`] evaluates the same recursion by
//! literal tree search and serves as an independent check.
//! [`solve_online`] is the constrained variant, searched per decision epoch.

mod alpha;
mod artifact;
mod backup;
mod expectimax;
mod prune;

pub use alpha::{is_tie, AlphaVector, ValueStage, TIE_TOLERANCE};
pub use artifact::{load_artifact, save_artifact, solve, PolicyArtifact};
pub use backup::backup;
pub use expectimax::{
    expectimax_oracle, online_action_values, oracle_action_values, solve_online, Decision,
    NEGLIGIBLE_LIKELIHOOD,
};
pub use prune::{dominates, prune_lp, prune_pointwise};

use thiserror::Error;

use crate::filter::FilterError;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("exact enumeration needs {candidates:.3e} candidate vectors, above the cap of {cap}; use the online solver")]
    CombinatorialBlowup { candidates: f64, cap: u64 },
    #[error("tree search of depth {depth} needs {leaves:.3e} leaves, above the cap of {cap}")]
    DepthCap { depth: usize, leaves: f64, cap: u64 },
    #[error("stage {stage} is outside the horizon 0..={horizon}")]
    StageOutOfRange { stage: usize, horizon: usize },
    #[error("cannot back up past stage 0")]
    StageUnderflow,
    #[error("belief has {found} entries but the model has {expected} states")]
    Dimension { expected: usize, found: usize },
    #[error("artifact fingerprint {artifact} does not match model fingerprint {model}")]
    FingerprintMismatch { artifact: String, model: String },
    #[error("model carries belief constraints; use the online solver")]
    Constrained,
    #[error("no admissible action keeps the belief inside the constraint set")]
    Infeasible,
    #[error("initial belief violates the stage-0 constraint (safe mass {safe_mass}, required {required})")]
    InfeasibleBelief { safe_mass: f64, required: f64 },
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error("artifact file: {0}")]
    Io(#[from] std::io::Error),
    #[error("artifact file: {0}")]
    Json(#[from] serde_json::Error),
}

/// How candidate vectors are reduced after each backup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PruneMode {
    /// Keep every enumerated vector.
    Off,
    /// Full cross-sum, then drop componentwise-dominated vectors.
    Pointwise,
    /// Incremental cross-sum with witness-LP pruning after each step.
    #[default]
    Lp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub prune: PruneMode,
    /// Cap on enumerated candidates (backup) or tree leaves (search).
    pub max_candidates: u64,
    /// LP pruning keeps a vector only if it wins somewhere by more than this.
    pub lp_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            prune: PruneMode::Lp,
            max_candidates: 10_000_000,
            lp_tolerance: 1e-11,
        }
    }
}
