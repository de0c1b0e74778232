//! One step of the dynamic programming recursion on α-vectors.
//!
//! For action `a`, observation `θ` and next-stage vector `γ'`, the projected
//! vector is `g_{a,θ,γ'}(i) = Σ_j p^a_{ij} r^a_{jθ} γ'(j)`. Each choice of one
//! projected vector per observation yields the candidate
//! `c(a) + α Σ_θ g_{a,θ,σ(θ)}`.

use rayon::prelude::*;

use super::alpha::{AlphaVector, ValueStage};
use super::prune::{prune_lp, prune_pointwise};
use super::{PruneMode, SolveError, SolverOptions};
use crate::model::PomdpModel;

/// `g_{a,θ,·}` for every next-stage vector, in next-stage order.
fn project(next: &ValueStage, model: &PomdpModel, action: usize, theta: usize) -> Vec<Vec<f64>> {
    let p = model.transition(action);
    let r = model.observation(action);
    let n = model.n_states();
    next.vectors
        .iter()
        .map(|v| {
            (0..n)
                .map(|i| {
                    p.row(i)
                        .iter()
                        .enumerate()
                        .map(|(j, &pij)| pij * r.get(j, theta) * v.gamma[j])
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn check_cap(count: f64, cap: u64) -> Result<(), SolveError> {
    if count > cap as f64 {
        Err(SolveError::CombinatorialBlowup {
            candidates: count,
            cap,
        })
    } else {
        Ok(())
    }
}

/// Every choice function, enumerated as an odometer over observations.
fn enumerate_action(
    model: &PomdpModel,
    action: usize,
    projections: &[Vec<Vec<f64>>],
) -> Vec<AlphaVector> {
    let n = model.n_states();
    let alpha = model.discount();
    let cost = model.cost(action);
    let sizes: Vec<usize> = projections.iter().map(Vec::len).collect();
    let mut choice = vec![0usize; projections.len()];
    let mut out = Vec::new();
    loop {
        let gamma: Vec<f64> = (0..n)
            .map(|i| {
                let cont: f64 = choice
                    .iter()
                    .enumerate()
                    .map(|(theta, &k)| projections[theta][k][i])
                    .sum();
                cost[i] + alpha * cont
            })
            .collect();
        out.push(AlphaVector::new(gamma, Some(action)));

        let mut digit = 0;
        loop {
            if digit == choice.len() {
                return out;
            }
            choice[digit] += 1;
            if choice[digit] < sizes[digit] {
                break;
            }
            choice[digit] = 0;
            digit += 1;
        }
    }
}

/// Incremental pruning: cross-sum one observation at a time, pruning after
/// each step. Exact because pruning commutes with the cross-sum.
fn incremental_action(
    model: &PomdpModel,
    action: usize,
    projections: &[Vec<Vec<f64>>],
    opts: &SolverOptions,
) -> Result<Vec<AlphaVector>, SolveError> {
    let alpha = model.discount();
    let scaled = |set: &Vec<Vec<f64>>| -> Vec<AlphaVector> {
        let vs = set
            .iter()
            .map(|g| AlphaVector::new(g.iter().map(|x| alpha * x).collect(), Some(action)))
            .collect();
        prune_lp(vs, opts.lp_tolerance)
    };

    let mut acc: Vec<AlphaVector> =
        vec![AlphaVector::new(model.cost(action).to_vec(), Some(action))];
    for set in projections {
        let term = scaled(set);
        check_cap(acc.len() as f64 * term.len() as f64, opts.max_candidates)?;
        let mut sum = Vec::with_capacity(acc.len() * term.len());
        for a in &acc {
            for t in &term {
                let gamma = a.gamma.iter().zip(&t.gamma).map(|(x, y)| x + y).collect();
                sum.push(AlphaVector::new(gamma, Some(action)));
            }
        }
        acc = prune_lp(sum, opts.lp_tolerance);
    }
    Ok(acc)
}

/// Builds stage `k` from stage `k + 1`.
pub fn backup(
    next: &ValueStage,
    model: &PomdpModel,
    opts: &SolverOptions,
) -> Result<ValueStage, SolveError> {
    if next.stage == 0 {
        return Err(SolveError::StageUnderflow);
    }
    if let Some(bad) = next
        .vectors
        .iter()
        .find(|v| v.gamma.len() != model.n_states())
    {
        return Err(SolveError::Dimension {
            expected: model.n_states(),
            found: bad.gamma.len(),
        });
    }
    let n_obs = model.n_observations();

    let per_action: Vec<Vec<AlphaVector>> = match opts.prune {
        PruneMode::Off | PruneMode::Pointwise => {
            let total = model.n_actions() as f64 * (next.vectors.len() as f64).powi(n_obs as i32);
            check_cap(total, opts.max_candidates)?;
            (0..model.n_actions())
                .into_par_iter()
                .map(|a| {
                    let proj: Vec<_> = (0..n_obs)
                        .map(|theta| project(next, model, a, theta))
                        .collect();
                    enumerate_action(model, a, &proj)
                })
                .collect()
        }
        PruneMode::Lp => (0..model.n_actions())
            .into_par_iter()
            .map(|a| {
                let proj: Vec<_> = (0..n_obs)
                    .map(|theta| project(next, model, a, theta))
                    .collect();
                incremental_action(model, a, &proj, opts)
            })
            .collect::<Result<_, _>>()?,
    };

    let all: Vec<AlphaVector> = per_action.into_iter().flatten().collect();
    let vectors = match opts.prune {
        PruneMode::Off => all,
        PruneMode::Pointwise => prune_pointwise(all),
        PruneMode::Lp => prune_lp(all, opts.lp_tolerance),
    };
    Ok(ValueStage {
        stage: next.stage - 1,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{builtin_healthcare_model, Belief};

    #[test]
    fn one_step_at_stage3_vertex() {
        let m = builtin_healthcare_model();
        for prune in [PruneMode::Off, PruneMode::Pointwise, PruneMode::Lp] {
            let opts = SolverOptions {
                prune,
                ..Default::default()
            };
            let stage = backup(&ValueStage::terminal(&m), &m, &opts).unwrap();
            assert_eq!(stage.stage, 3);
            let (v, a) = stage.best(&Belief::vertex(3, 2));
            assert!((v - 52.0).abs() <= 1e-12, "{v}");
            assert_eq!(a, Some(1));
        }
    }

    #[test]
    fn skip_candidate_at_stage1_vertex() {
        let m = builtin_healthcare_model();
        let opts = SolverOptions {
            prune: PruneMode::Off,
            ..Default::default()
        };
        let stage = backup(&ValueStage::terminal(&m), &m, &opts).unwrap();
        let e1 = Belief::vertex(3, 0);
        let skip = stage.vectors.iter().find(|v| v.action == Some(0)).unwrap();
        assert!((skip.value(&e1) - 1.36).abs() < 1e-12);
    }

    #[test]
    fn pointwise_mode_blows_up_on_healthcare() {
        let m = builtin_healthcare_model();
        let opts = SolverOptions {
            prune: PruneMode::Pointwise,
            ..Default::default()
        };
        let mut stage = ValueStage::terminal(&m);
        let mut err = None;
        for _ in 0..m.horizon() {
            match backup(&stage, &m, &opts) {
                Ok(s) => stage = s,
                Err(e) => {
                    err = Some(e);
                    break;
                }
            }
        }
        assert!(matches!(err, Some(SolveError::CombinatorialBlowup { .. })));
    }

    #[test]
    fn zero_discount_keeps_stage_costs() {
        let m = builtin_healthcare_model()
            .with_overrides(Some(1), Some(0.0), None)
            .unwrap();
        let stage = backup(&ValueStage::terminal(&m), &m, &SolverOptions::default()).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(1);
        for _ in 0..200 {
            let b = Belief::sample_uniform(3, &mut rng);
            let direct = (0..4)
                .map(|a| b.dot(m.cost(a)))
                .fold(f64::INFINITY, f64::min);
            assert!((stage.value(&b) - direct).abs() < 1e-12);
        }
    }
}
