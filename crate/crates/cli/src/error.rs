use std::path::PathBuf;

use smpc_core::controller::ControllerError;
use smpc_core::guarantees::GuaranteeError;
use smpc_core::model::ModelError;
use smpc_core::sim::SimError;
use smpc_core::solver::SolveError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("monotonicity violated: max V0 - V1 gap {gap} exceeds eta {eta}")]
    Monotonicity { gap: f64, eta: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Guarantee(#[from] GuaranteeError),
    #[error(transparent)]
    Controller(#[from] ControllerError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_MONOTONICITY: i32 = 4;
pub const EXIT_INFEASIBLE: i32 = 5;
pub const EXIT_USAGE: i32 = 64;

fn solve_code(e: &SolveError) -> i32 {
    match e {
        SolveError::CombinatorialBlowup { .. } | SolveError::DepthCap { .. } => EXIT_BLOWUP,
        SolveError::Io(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Model(_) | CliError::Json { .. } => EXIT_INVALID,
            CliError::Io { .. } => EXIT_IO,
            CliError::Monotonicity { .. } => EXIT_MONOTONICITY,
            CliError::Solve(e) => solve_code(e),
            CliError::Guarantee(GuaranteeError::Solve(e)) => solve_code(e),
            CliError::Guarantee(_) => EXIT_INVALID,
            CliError::Controller(ControllerError::Solve(e)) => solve_code(e),
            CliError::Controller(_) => EXIT_INVALID,
            CliError::Sim(SimError::Infeasible { .. }) => EXIT_INFEASIBLE,
            CliError::Sim(SimError::Controller(ControllerError::Solve(e))) => solve_code(e),
            CliError::Sim(_) => EXIT_INVALID,
        }
    }
}
