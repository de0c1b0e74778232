use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::model::{Belief, PomdpModel};

/// Values within this relative distance of the minimum count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// A linear piece `π ↦ π·gamma` of a value function, tagged with the action
/// whose backup produced it. Terminal vectors carry no action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaVector {
    pub gamma: Vec<f64>,
    pub action: Option<usize>,
}

impl AlphaVector {
    pub fn new(gamma: Vec<f64>, action: Option<usize>) -> Self {
        AlphaVector { gamma, action }
    }

    #[inline]
    pub fn value(&self, belief: &Belief) -> f64 {
        belief.dot(&self.gamma)
    }
}

/// Whether `value` is tied with `best` under [`TIE_TOLERANCE`].
#[inline]
pub fn is_tie(value: f64, best: f64) -> bool {
    value - best <= TIE_TOLERANCE * best.abs().max(1.0)
}

/// Lexicographic comparison; used as the final tie-break between vectors.
pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Orders actions with the terminal sentinel (`None`) last.
fn action_key(action: Option<usize>) -> usize {
    action.unwrap_or(usize::MAX)
}

/// Index of the minimizing vector at `belief`: smallest value, then lowest
/// action, then lexicographically smallest gamma.
pub(crate) fn best_index<'a, I>(vectors: I, belief: &Belief) -> Option<usize>
where
    I: IntoIterator<Item = &'a AlphaVector>,
    I::IntoIter: Clone,
{
    let iter = vectors.into_iter();
    let min = iter
        .clone()
        .map(|v| v.value(belief))
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return None;
    }
    let mut best: Option<(usize, &AlphaVector)> = None;
    for (i, v) in iter.enumerate() {
        if !is_tie(v.value(belief), min) {
            continue;
        }
        best = match best {
            None => Some((i, v)),
            Some((bi, bv)) => {
                let ord = action_key(v.action)
                    .cmp(&action_key(bv.action))
                    .then_with(|| lex_cmp(&v.gamma, &bv.gamma));
                if ord == Ordering::Less {
                    Some((i, v))
                } else {
                    Some((bi, bv))
                }
            }
        };
    }
    best.map(|(i, _)| i)
}

/// The value function at one stage of the horizon: the pointwise minimum of
/// its vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueStage {
    pub stage: usize,
    pub vectors: Vec<AlphaVector>,
}

impl ValueStage {
    /// Stage `N`: the single vector `c_N`.
    pub fn terminal(model: &PomdpModel) -> Self {
        ValueStage {
            stage: model.horizon(),
            vectors: vec![AlphaVector::new(model.terminal_cost().to_vec(), None)],
        }
    }

    pub fn value(&self, belief: &Belief) -> f64 {
        self.vectors
            .iter()
            .map(|v| v.value(belief))
            .fold(f64::INFINITY, f64::min)
    }

    /// Minimum value and the action of the winning vector.
    pub fn best(&self, belief: &Belief) -> (f64, Option<usize>) {
        let i = best_index(&self.vectors, belief).expect("value stage is non-empty");
        (self.value(belief), self.vectors[i].action)
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_prefer_lowest_action() {
        let stage = ValueStage {
            stage: 0,
            vectors: vec![
                AlphaVector::new(vec![1.0, 3.0], Some(2)),
                AlphaVector::new(vec![3.0, 1.0], Some(1)),
                AlphaVector::new(vec![2.0, 2.0], Some(0)),
            ],
        };
        // All three give 2 at the uniform belief.
        assert_eq!(stage.best(&Belief::uniform(2)), (2.0, Some(0)));
        assert_eq!(stage.best(&Belief::vertex(2, 0)), (1.0, Some(2)));
    }

    #[test]
    fn ties_within_an_action_prefer_lexicographic_minimum() {
        let vs = [
            AlphaVector::new(vec![3.0, 1.0], Some(0)),
            AlphaVector::new(vec![1.0, 3.0], Some(0)),
        ];
        assert_eq!(best_index(&vs, &Belief::uniform(2)), Some(1));
    }

    #[test]
    fn terminal_stage_is_terminal_cost() {
        let m = crate::model::builtin_healthcare_model();
        let t = ValueStage::terminal(&m);
        assert_eq!(t.best(&Belief::uniform(3)).0, 68.0 / 3.0);
        assert_eq!(t.best(&Belief::vertex(3, 0)), (0.0, None));
    }
}
