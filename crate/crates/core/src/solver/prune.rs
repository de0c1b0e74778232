//! Removal of useless vectors from a value-function representation.
//!
//! Point-wise pruning drops vectors dominated componentwise by another
//! vector; it never changes the represented minimum. LP pruning additionally
//! drops vectors that are not the strict minimizer at any belief, using a
//! witness linear program per candidate.

use std::cmp::Ordering;

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use super::alpha::{best_index, lex_cmp, AlphaVector};
use crate::model::Belief;

/// Drops exact duplicates (keeping the first) and every vector that some
/// other vector is componentwise `<=`. Survivors keep their input order.
pub fn prune_pointwise(vectors: Vec<AlphaVector>) -> Vec<AlphaVector> {
    if vectors.len() <= 1 {
        return vectors;
    }
    // A dominator has a no-larger component sum and is lexicographically
    // smaller, so in this order it is always visited first.
    let sums: Vec<f64> = vectors.iter().map(|v| v.gamma.iter().sum()).collect();
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by(|&i, &j| {
        sums[i]
            .total_cmp(&sums[j])
            .then_with(|| lex_cmp(&vectors[i].gamma, &vectors[j].gamma))
            .then_with(|| i.cmp(&j))
    });

    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let v = &vectors[i].gamma;
        let dominated = kept
            .iter()
            .any(|&k| vectors[k].gamma.iter().zip(v).all(|(w, x)| w <= x));
        if !dominated {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    let mut keep = vec![false; vectors.len()];
    for k in kept {
        keep[k] = true;
    }
    vectors
        .into_iter()
        .zip(keep)
        .filter_map(|(v, k)| k.then_some(v))
        .collect()
}

/// Finds a belief where `candidate` beats every vector in `winners` by more
/// than `tolerance`, if one exists.
fn find_witness(candidate: &[f64], winners: &[&[f64]], tolerance: f64) -> Option<Belief> {
    let n = candidate.len();
    if winners.is_empty() {
        return Some(Belief::uniform(n));
    }
    // maximize d  s.t.  b·(w − v) ≥ d  for all winners w,  Σ b = 1,  b ≥ 0.
    let spread = winners
        .iter()
        .flat_map(|w| w.iter().zip(candidate).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    let bound = spread + 1.0;

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let b: Vec<_> = (0..n).map(|_| lp.add_var(0.0, (0.0, 1.0))).collect();
    let d = lp.add_var(1.0, (-bound, bound));
    lp.add_constraint(b.iter().map(|&x| (x, 1.0)), ComparisonOp::Eq, 1.0);
    for w in winners {
        let terms = b
            .iter()
            .zip(w.iter().zip(candidate))
            .map(|(&x, (wi, vi))| (x, wi - vi))
            .chain(std::iter::once((d, -1.0)));
        lp.add_constraint(terms, ComparisonOp::Ge, 0.0);
    }
    let solution = lp.solve().ok()?;
    if solution.objective() <= tolerance {
        return None;
    }
    let belief = Belief::new(b.iter().map(|&x| solution[x].max(0.0)).collect()).ok()?;
    // Trust the witness only if the exact margin confirms it.
    let margin = winners
        .iter()
        .map(|w| belief.dot(w) - belief.dot(candidate))
        .fold(f64::INFINITY, f64::min);
    (margin > tolerance).then_some(belief)
}

/// Keeps only vectors that are the minimizer somewhere on the simplex by a
/// margin above `tolerance`. Output keeps input order.
///
/// Winners are grown one at a time: each candidate is tested against the
/// current winners, and a successful witness admits the best remaining
/// vector at that belief.
pub fn prune_lp(vectors: Vec<AlphaVector>, tolerance: f64) -> Vec<AlphaVector> {
    let vectors = prune_pointwise(vectors);
    if vectors.len() <= 1 {
        return vectors;
    }
    let n = vectors[0].gamma.len();
    let mut in_winners = vec![false; vectors.len()];
    let mut winners: Vec<usize> = Vec::new();
    let mut remaining: Vec<usize> = (0..vectors.len()).collect();

    let admit = |b: &Belief,
                 remaining: &mut Vec<usize>,
                 winners: &mut Vec<usize>,
                 in_winners: &mut Vec<bool>| {
        let pool: Vec<&AlphaVector> = remaining.iter().map(|&i| &vectors[i]).collect();
        if let Some(p) = best_index(pool.iter().copied(), b) {
            let idx = remaining.remove(p);
            winners.push(idx);
            in_winners[idx] = true;
        }
    };

    for s in 0..n {
        let b = Belief::vertex(n, s);
        admit(&b, &mut remaining, &mut winners, &mut in_winners);
    }
    remaining.reverse();

    while let Some(i) = remaining.pop() {
        let winner_gammas: Vec<&[f64]> = winners
            .iter()
            .map(|&w| vectors[w].gamma.as_slice())
            .collect();
        if let Some(b) = find_witness(&vectors[i].gamma, &winner_gammas, tolerance) {
            remaining.push(i);
            admit(&b, &mut remaining, &mut winners, &mut in_winners);
            // Keep popping in original order.
            remaining.sort_unstable_by(|a, b| b.cmp(a));
        }
    }

    vectors
        .into_iter()
        .zip(in_winners)
        .filter_map(|(v, k)| k.then_some(v))
        .collect()
}

/// Componentwise `a <= b` with `a != b`.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
        && a.iter()
            .zip(b)
            .any(|(x, y)| x.partial_cmp(y) == Some(Ordering::Less))
}
