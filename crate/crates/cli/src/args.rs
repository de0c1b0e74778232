use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Dual-optimal stochastic MPC for finite POMDPs.
///
/// Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 solver blowup,
/// 4 monotonicity violation, 5 constraint infeasible during a run,
/// 64 command-line usage error.
#[derive(Debug, Parser)]
#[command(name = "smpc", version, about, long_about)]
pub struct Cli {
    /// Worker thread cap (default: available parallelism)
    #[arg(long, global = true, env = "PSMPC_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the finite-horizon problem offline and write the policy artifact
    Solve(SolveArgs),
    /// Certify the terminal-cost assumption and compute the performance bound
    Certify(CertifyArgs),
    /// Run closed-loop simulations or replay an observation sequence
    Simulate(SimulateArgs),
    /// Write the resolved model as JSON
    DumpModel(DumpArgs),
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Model file, or the builtin name "healthcare"
    #[arg(long, default_value = "healthcare")]
    pub model: String,
    /// Override the horizon N
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Override the discount factor
    #[arg(long)]
    pub discount: Option<f64>,
    /// Override the initial belief (comma separated)
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub pi0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PruneArg {
    Off,
    Pointwise,
    Lp,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// α-vector pruning strategy
    #[arg(long, value_enum, default_value_t = PruneArg::Lp)]
    pub prune: PruneArg,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Artifact output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Terminal action: 1-based number or action name
    #[arg(long)]
    pub terminal_action: String,
    /// Use this η for the bound instead of the computed pathwise value
    #[arg(long)]
    pub eta: Option<f64>,
    /// Use this design cost instead of V_0(π_0)
    #[arg(long)]
    pub design_cost: Option<f64>,
    /// Random beliefs checked for value monotonicity (vertices always checked)
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Seed for the sampled beliefs
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Certificate output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Pre-solved artifact (solved on the fly otherwise)
    #[arg(long)]
    pub artifact: Option<PathBuf>,
    /// Policy: smpc, ce (certainty equivalent) or constant:<action>
    #[arg(long, default_value = "smpc")]
    pub policy: String,
    /// Number of independent runs
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Steps per run
    #[arg(long, default_value_t = 30)]
    pub steps: usize,
    /// Master seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fixed true initial state (1-based number or name); sampled from π_0 otherwise
    #[arg(long)]
    pub x0: Option<String>,
    /// Certificate whose bound is checked against the simulated cost
    #[arg(long)]
    pub certificate: Option<PathBuf>,
    /// Explicit cost bound (overrides the certificate)
    #[arg(long)]
    pub bound: Option<f64>,
    /// JSON list of observation indices to replay instead of simulating
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// Output format (default: csv for one run or a replay, json for a batch)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output path
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Output path (standard output otherwise)
    #[arg(long)]
    pub out: Option<PathBuf>,
}
