use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use smpc_core::guarantees::{bound_from, check_value_monotonicity, compute_eta, Certificate};
use smpc_core::model::{builtin_healthcare_model, load_model, Belief, PomdpModel};
use smpc_core::sim::{
    run_batch, simulate, trajectory_csv, CertaintyEquivalent, InitialState, Policy,
    SimulationSummary,
};
use smpc_core::solver::{
    load_artifact, save_artifact, solve, PolicyArtifact, PruneMode, SolverOptions,
};
use smpc_core::Controller;

use crate::args::{
    CertifyArgs, DumpArgs, Format, ModelArgs, PruneArg, SimulateArgs, SolveArgs, SolverArgs,
};
use crate::error::CliError;
use crate::fmt::{g6, g6_list};

pub fn resolve_model(args: &ModelArgs) -> Result<PomdpModel, CliError> {
    let base = if args.model == "healthcare" {
        builtin_healthcare_model()
    } else {
        load_model(&args.model)?
    };
    if args.horizon.is_none() && args.discount.is_none() && args.pi0.is_none() {
        return Ok(base);
    }
    Ok(base.with_overrides(args.horizon, args.discount, args.pi0.clone())?)
}

fn solver_options(args: &SolverArgs) -> SolverOptions {
    SolverOptions {
        prune: match args.prune {
            PruneArg::Off => PruneMode::Off,
            PruneArg::Pointwise => PruneMode::Pointwise,
            PruneArg::Lp => PruneMode::Lp,
        },
        ..SolverOptions::default()
    }
}

/// 1-based number or exact name; returns the 0-based index.
fn select(selector: &str, names: &[String], what: &str) -> Result<usize, CliError> {
    if let Some(i) = names.iter().position(|n| n == selector) {
        return Ok(i);
    }
    match selector.parse::<usize>() {
        Ok(k) if (1..=names.len()).contains(&k) => Ok(k - 1),
        Ok(k) => Err(CliError::Invalid(format!(
            "{what} {k} out of range (expected 1..={})",
            names.len()
        ))),
        Err(_) => Err(CliError::Invalid(format!("unknown {what} '{selector}'"))),
    }
}

fn action_names(model: &PomdpModel) -> Vec<String> {
    model.actions().iter().map(|a| a.name.clone()).collect()
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.to_owned(),
        source,
    })
}

pub fn cmd_solve(args: &SolveArgs) -> Result<(), CliError> {
    let model = resolve_model(&args.model)?;
    let artifact = solve(&model, &solver_options(&args.solver))?;
    let pi0 = model.initial_belief_or_uniform();
    println!(
        "model: {} (N = {}, alpha = {})",
        model.name(),
        model.horizon(),
        g6(model.discount())
    );
    println!("pi0: {}", g6_list(pi0.as_slice()));
    println!("design cost V0(pi0): {}", g6(artifact.value(&pi0)?));
    let sizes: Vec<String> = artifact
        .stages
        .iter()
        .map(|s| s.len().to_string())
        .collect();
    println!("stage-0 vectors: {}", artifact.stages[0].len());
    println!("vectors per stage: [{}]", sizes.join(", "));
    if let Some(out) = &args.out {
        save_artifact(&artifact, out)?;
        println!("artifact written to {}", out.display());
    }
    Ok(())
}

pub fn cmd_certify(args: &CertifyArgs) -> Result<(), CliError> {
    let model = resolve_model(&args.model)?;
    let terminal = select(&args.terminal_action, &action_names(&model), "action")?;
    let eta = compute_eta(&model, terminal)?;
    if let Some(e) = args.eta {
        if !e.is_finite() || e < 0.0 {
            return Err(CliError::Invalid(format!(
                "eta must be finite and non-negative (got {e})"
            )));
        }
    }
    let eta_used = args.eta.unwrap_or(eta.eta_pathwise);
    let artifact = solve(&model, &solver_options(&args.solver))?;
    let pi0 = model.initial_belief_or_uniform();
    let design_cost = match args.design_cost {
        Some(d) => d,
        None => artifact.value(&pi0)?,
    };
    let bound = bound_from(design_cost, model.discount(), eta_used);
    let report = check_value_monotonicity(&artifact, eta_used, args.samples, args.seed)?;

    println!(
        "terminal action: {} ({})",
        terminal + 1,
        model.action(terminal).name
    );
    println!("eta (pathwise): {}", g6(eta.eta_pathwise));
    println!("eta (expected): {}", g6(eta.eta_expected));
    if args.eta.is_some() {
        println!("eta (used): {}", g6(eta_used));
    }
    println!("pi0: {}", g6_list(pi0.as_slice()));
    println!("design cost: {}", g6(design_cost));
    println!("bound: {}", g6(bound));
    println!(
        "monotonicity: max V0 - V1 gap {} over {} beliefs ({})",
        g6(report.max_gap),
        report.beliefs_checked,
        if report.violation { "VIOLATED" } else { "ok" }
    );

    if let Some(out) = &args.out {
        let cert = Certificate {
            eta_pathwise: eta.eta_pathwise,
            eta_expected: eta.eta_expected,
            terminal_action: terminal,
            design_cost,
            pi0,
            bound,
            alpha: model.discount(),
            horizon: model.horizon(),
            monotonicity_max_gap: report.max_gap,
            violation: report.violation,
        };
        let text = serde_json::to_string_pretty(&cert).expect("certificate serializes");
        write_file(out, &text)?;
        println!("certificate written to {}", out.display());
    }
    if report.violation {
        return Err(CliError::Monotonicity {
            gap: report.max_gap,
            eta: eta_used,
        });
    }
    Ok(())
}

fn obtain_artifact(
    model: &PomdpModel,
    args: &SimulateArgs,
) -> Result<Option<PolicyArtifact>, CliError> {
    if model.constraint().is_some() {
        return Ok(None);
    }
    let artifact = match &args.artifact {
        Some(path) => load_artifact(path)?,
        None => solve(model, &solver_options(&args.solver))?,
    };
    artifact.check_model(model)?;
    Ok(Some(artifact))
}

fn replay(model: &PomdpModel, args: &SimulateArgs, path: &Path) -> Result<(), CliError> {
    let observations: Vec<usize> = read_json(path)?;
    let artifact = obtain_artifact(model, args)?;
    let pi0 = model.initial_belief_or_uniform();
    let opts = solver_options(&args.solver);
    let mut controller = match &artifact {
        Some(a) => Controller::with_artifact(model, a, pi0)?,
        None => Controller::online(model, pi0, &opts)?,
    };
    let n = model.n_states();
    let mut rows = Vec::with_capacity(observations.len());
    for (k, &y) in observations.iter().enumerate() {
        if y >= model.n_observations() {
            return Err(CliError::Invalid(format!(
                "replay step {k}: observation {y} out of range ({} observations)",
                model.n_observations()
            )));
        }
        let belief = controller.belief().as_slice().to_vec();
        let action = controller.decide().map_err(|e| match e {
            smpc_core::ControllerError::Solve(smpc_core::SolveError::Infeasible) => {
                CliError::Sim(smpc_core::SimError::Infeasible { step: k })
            }
            other => other.into(),
        })?;
        controller.advance(y, None)?;
        rows.push((k, action, y, belief));
    }
    let text = match args.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("step,action,observation");
            for i in 1..=n {
                let _ = write!(s, ",belief_{i}");
            }
            s.push('\n');
            for (k, a, y, b) in &rows {
                let _ = write!(s, "{k},{a},{y}");
                for x in b {
                    let _ = write!(s, ",{x}");
                }
                s.push('\n');
            }
            s
        }
        Format::Json => {
            let log: Vec<_> = rows
                .iter()
                .map(|(k, a, y, b)| serde_json::json!({"step": k, "action": a, "observation": y, "belief": b}))
                .collect();
            serde_json::to_string_pretty(&serde_json::json!({
                "steps": log,
                "final_belief": controller.belief().as_slice(),
            }))
            .expect("log serializes")
        }
    };
    match &args.out {
        Some(out) => {
            write_file(out, &text)?;
            println!(
                "replayed {} observations; log written to {}",
                rows.len(),
                out.display()
            );
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn resolve_bound(args: &SimulateArgs, pi0: &Belief) -> Result<Option<f64>, CliError> {
    if let Some(b) = args.bound {
        return Ok(Some(b));
    }
    let Some(path) = &args.certificate else {
        return Ok(None);
    };
    let cert: Certificate = read_json(path)?;
    let same_pi0 = cert.pi0.len() == pi0.len()
        && cert
            .pi0
            .as_slice()
            .iter()
            .zip(pi0.as_slice())
            .all(|(a, b)| (a - b).abs() <= 1e-12);
    if !same_pi0 {
        eprintln!(
            "warning: certificate was issued for pi0 {} but the simulation starts from {}",
            g6_list(cert.pi0.as_slice()),
            g6_list(pi0.as_slice())
        );
    }
    Ok(Some(cert.bound))
}

fn print_summary(s: &SimulationSummary) {
    println!("policy: {}", s.policy);
    println!("runs: {}, steps: {}, seed: {}", s.runs, s.steps, s.seed);
    println!("mean discounted cost: {}", g6(s.mean_cost));
    println!("stddev: {}", g6(s.stddev_cost));
    println!("min / max: {} / {}", g6(s.min_cost), g6(s.max_cost));
    println!("tail bound: {}", g6(s.tail_bound));
    let hist: Vec<String> = s.action_histogram.iter().map(|c| c.to_string()).collect();
    println!("action histogram: [{}]", hist.join(", "));
    if let (Some(b), Some(margin), Some(frac)) = (s.bound, s.bound_margin, s.fraction_within_bound)
    {
        println!(
            "bound compliance: mean + tail = {} vs bound {} (margin {}): {}",
            g6(s.mean_cost + s.tail_bound),
            g6(b),
            g6(margin),
            if margin > 0.0 { "PASS" } else { "FAIL" }
        );
        println!("runs within bound: {}", g6(frac));
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let model = resolve_model(&args.model)?;
    if let Some(path) = &args.replay {
        return replay(&model, args, path);
    }
    if args.runs == 0 || args.steps == 0 {
        return Err(CliError::Invalid(
            "--runs and --steps must be at least 1".into(),
        ));
    }
    let pi0 = model.initial_belief_or_uniform();
    let init = match &args.x0 {
        Some(sel) => InitialState::Fixed(select(sel, model.state_names(), "state")?),
        None => InitialState::SampleFromBelief,
    };
    let bound = resolve_bound(args, &pi0)?;
    let opts = solver_options(&args.solver);

    let mut artifact = None;
    let ce;
    let policy = match args.policy.as_str() {
        "smpc" => match obtain_artifact(&model, args)? {
            Some(a) => Policy::Smpc(artifact.insert(a)),
            None => Policy::SmpcOnline(opts),
        },
        "ce" | "certainty-equivalent" => {
            ce = CertaintyEquivalent::new(&model);
            Policy::CertaintyEquivalent(&ce)
        }
        other => match other.strip_prefix("constant:") {
            Some(sel) => Policy::Constant(select(sel, &action_names(&model), "action")?),
            None => {
                return Err(CliError::Invalid(format!(
                    "unknown policy '{other}' (expected smpc, ce or constant:<action>)"
                )))
            }
        },
    };

    if args.runs == 1 {
        let record = simulate(&model, &policy, &pi0, init, args.steps, args.seed)?;
        println!("policy: {}", policy.label());
        println!("pi0: {}", g6_list(pi0.as_slice()));
        println!(
            "truncated discounted cost: {}",
            g6(record.truncated_discounted_cost)
        );
        let actions: Vec<String> = record
            .steps
            .iter()
            .map(|s| (s.action + 1).to_string())
            .collect();
        println!("actions: {}", actions.join(" "));
        if let Some(b) = bound {
            let status = if record.truncated_discounted_cost <= b {
                "below"
            } else {
                "ABOVE"
            };
            println!("bound {}: {status}", g6(b));
        }
        if let Some(out) = &args.out {
            let text = match args.format.unwrap_or(Format::Csv) {
                Format::Csv => trajectory_csv(&record),
                Format::Json => serde_json::to_string_pretty(&record).expect("record serializes"),
            };
            write_file(out, &text)?;
            println!("trajectory written to {}", out.display());
        }
    } else {
        if args.format == Some(Format::Csv) {
            return Err(CliError::Invalid(
                "csv output covers a single run; use --format json for batches".into(),
            ));
        }
        let summary = run_batch(
            &model, &policy, &pi0, init, args.runs, args.steps, args.seed, bound,
        )?;
        print_summary(&summary);
        if let Some(out) = &args.out {
            write_file(
                out,
                &serde_json::to_string_pretty(&summary).expect("summary serializes"),
            )?;
            println!("summary written to {}", out.display());
        }
    }
    Ok(())
}

pub fn cmd_dump_model(args: &DumpArgs) -> Result<(), CliError> {
    let model = resolve_model(&args.model)?;
    let text = serde_json::to_string_pretty(&model.to_raw()).expect("model serializes");
    match &args.out {
        Some(out) => write_file(out, &text)?,
        None => println!("{text}"),
    }
    Ok(())
}
