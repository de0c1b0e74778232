#![allow(dead_code)]

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smpc_core::model::{validate_model, RawAction, RawModel};
use smpc_core::{Belief, PomdpModel};

/// Dimensions and a content seed; small enough for exhaustive solvers.
#[derive(Debug, Clone, Copy)]
pub struct ModelSpec {
    pub states: usize,
    pub actions: usize,
    pub observations: usize,
    pub horizon: usize,
    pub discount: f64,
    pub seed: u64,
}

pub fn model_spec(max_horizon: usize) -> impl Strategy<Value = ModelSpec> {
    (
        1usize..=4,
        1usize..=4,
        1usize..=4,
        0..=max_horizon,
        0.0f64..0.99,
        any::<u64>(),
    )
        .prop_map(
            |(states, actions, observations, horizon, discount, seed)| ModelSpec {
                states,
                actions,
                observations,
                horizon,
                discount,
                seed,
            },
        )
}

fn stochastic_row(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(0.3) {
                0.0
            } else {
                rng.random_range(0.05..1.0)
            }
        })
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        w[rng.random_range(0..n)] = 1.0;
    }
    let s: f64 = w.iter().sum();
    w.iter().map(|x| x / s).collect()
}

pub fn raw_model(spec: &ModelSpec) -> RawModel {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, m) = (spec.states, spec.observations);
    let actions = (0..spec.actions)
        .map(|a| RawAction {
            name: format!("a{a}"),
            transition: (0..n).map(|_| stochastic_row(&mut rng, n)).collect(),
            observation: (0..n).map(|_| stochastic_row(&mut rng, m)).collect(),
            cost: (0..n).map(|_| rng.random_range(0.0..10.0)).collect(),
        })
        .collect();
    RawModel {
        name: format!("random-{}", spec.seed),
        states: (0..n).map(|i| format!("s{i}")).collect(),
        observations: (0..m).map(|i| format!("o{i}")).collect(),
        discount: spec.discount,
        horizon: spec.horizon,
        initial_belief: None,
        actions,
        terminal_cost: (0..n).map(|_| rng.random_range(0.0..20.0)).collect(),
        constraint: None,
    }
}

pub fn random_model(spec: &ModelSpec) -> PomdpModel {
    validate_model(&raw_model(spec)).expect("generated model is valid")
}

/// All vertices followed by `count` uniform draws.
pub fn test_beliefs(n: usize, count: usize, seed: u64) -> Vec<Belief> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| Belief::vertex(n, i))
        .chain((0..count).map(|_| Belief::sample_uniform(n, &mut rng)))
        .collect()
}
