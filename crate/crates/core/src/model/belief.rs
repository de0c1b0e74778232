//! Information states: probability vectors over the hidden state.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Entries more negative than this are rejected instead of clamped.
pub const NEGATIVE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeliefError {
    #[error("belief must have at least one entry")]
    Empty,
    #[error("belief entry {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("belief entry {index} is negative ({value})")]
    Negative { index: usize, value: f64 },
    #[error("belief has zero total mass")]
    ZeroMass,
    #[error("belief has {found} entries, expected {expected}")]
    Dimension { expected: usize, found: usize },
}

/// A point on the probability simplex over states.
///
/// Construction renormalizes, so the entries always sum to one up to
/// rounding in the final division.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(weights: Vec<f64>) -> Result<Self, BeliefError> {
        if weights.is_empty() {
            return Err(BeliefError::Empty);
        }
        let mut weights = weights;
        for (index, w) in weights.iter_mut().enumerate() {
            if !w.is_finite() {
                return Err(BeliefError::NonFinite { index, value: *w });
            }
            if *w < -NEGATIVE_SLACK {
                return Err(BeliefError::Negative { index, value: *w });
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(BeliefError::ZeroMass);
        }
        for w in &mut weights {
            *w /= total;
        }
        Ok(Belief(weights))
    }

    /// Builds a belief and checks it against the expected state count.
    pub fn with_len(weights: Vec<f64>, n_states: usize) -> Result<Self, BeliefError> {
        if weights.len() != n_states {
            return Err(BeliefError::Dimension {
                expected: n_states,
                found: weights.len(),
            });
        }
        Belief::new(weights)
    }

    pub fn uniform(n_states: usize) -> Self {
        assert!(n_states > 0, "uniform belief over zero states");
        Belief(vec![1.0 / n_states as f64; n_states])
    }

    /// The point mass `e_i`.
    pub fn vertex(n_states: usize, state: usize) -> Self {
        assert!(
            state < n_states,
            "vertex {state} out of range for {n_states} states"
        );
        let mut w = vec![0.0; n_states];
        w[state] = 1.0;
        Belief(w)
    }

    /// Draws a belief uniformly from the simplex (flat Dirichlet).
    pub fn sample_uniform<R: Rng + ?Sized>(n_states: usize, rng: &mut R) -> Self {
        loop {
            let draws: Vec<f64> = (0..n_states).map(|_| Exp1.sample(rng)).collect();
            if let Ok(b) = Belief::new(draws) {
                return b;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Inner product `π·v`, summed in index order.
    pub fn dot(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(self.0.len(), v.len());
        self.0.iter().zip(v).map(|(p, x)| p * x).sum()
    }

    /// Most likely state; ties go to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &p) in self.0.iter().enumerate() {
            if p > self.0[best] {
                best = i;
            }
        }
        best
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .0
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>()
    }

    /// Total mass on the given set of states.
    pub fn mass_on(&self, states: &[usize]) -> f64 {
        states.iter().map(|&s| self.0[s]).sum()
    }
}

impl TryFrom<Vec<f64>> for Belief {
    type Error = BeliefError;

    fn try_from(value: Vec<f64>) -> Result<Self, Self::Error> {
        Belief::new(value)
    }
}

impl From<Belief> for Vec<f64> {
    fn from(b: Belief) -> Self {
        b.0
    }
}

impl AsRef<[f64]> for Belief {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
