//! Finite POMDP models: validated transition/observation data, costs,
//! discount, horizon and optional belief constraints.

mod belief;
mod constraint;
mod healthcare;
mod io;

pub use belief::{Belief, BeliefError};
pub use constraint::{BeliefConstraint, ConstraintSchedule};
pub use healthcare::builtin_healthcare_model;
pub use io::{load_model, save_model, RawAction, RawConstraint, RawModel, RawStageConstraint};

use sha2::{Digest, Sha256};
use thiserror::Error;

/// Row sums of stochastic matrices must be within this of one.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("model must have at least one {0}")]
    Empty(&'static str),
    #[error("{what}: expected {expected} entries, found {found}")]
    Dimension {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("{matrix} row {row} sums to {sum} (defect {defect:.3e})")]
    RowSum {
        matrix: String,
        row: usize,
        sum: f64,
        defect: f64,
    },
    #[error("{matrix}[{row}][{col}] is a negative probability ({value})")]
    NegativeProbability {
        matrix: String,
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("{what}[{index}] is not finite ({value})")]
    NonFinite {
        what: String,
        index: usize,
        value: f64,
    },
    #[error("{what}[{index}] is a negative cost ({value})")]
    NegativeCost {
        what: String,
        index: usize,
        value: f64,
    },
    #[error("discount must be < 1 (got {0})")]
    DiscountTooLarge(f64),
    #[error("discount must be >= 0 (got {0})")]
    DiscountNegative(f64),
    #[error("initial belief: {0}")]
    InitialBelief(#[from] BeliefError),
    #[error("constraint: {0}")]
    Constraint(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Dense row-major matrix whose rows are probability distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl StochasticMatrix {
    fn from_rows(
        name: &str,
        rows: &[Vec<f64>],
        n_rows: usize,
        n_cols: usize,
        tolerance: f64,
    ) -> Result<Self, ModelError> {
        if rows.len() != n_rows {
            return Err(ModelError::Dimension {
                what: format!("{name} rows"),
                expected: n_rows,
                found: rows.len(),
            });
        }
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(ModelError::Dimension {
                    what: format!("{name} row {i}"),
                    expected: n_cols,
                    found: row.len(),
                });
            }
            for (j, &p) in row.iter().enumerate() {
                if !p.is_finite() {
                    return Err(ModelError::NonFinite {
                        what: format!("{name}[{i}]"),
                        index: j,
                        value: p,
                    });
                }
                if p < 0.0 {
                    return Err(ModelError::NegativeProbability {
                        matrix: name.to_string(),
                        row: i,
                        col: j,
                        value: p,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            let defect = (sum - 1.0).abs();
            if defect > tolerance {
                return Err(ModelError::RowSum {
                    matrix: name.to_string(),
                    row: i,
                    sum,
                    defect,
                });
            }
            data.extend_from_slice(row);
        }
        Ok(StochasticMatrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_nested(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

/// One decision: its dynamics `P(a)`, observation kernel `R(a)` and cost `c(a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpec {
    pub name: String,
    pub transition: StochasticMatrix,
    pub observation: StochasticMatrix,
    pub cost: Vec<f64>,
}

/// A validated, immutable finite POMDP.
#[derive(Debug, Clone, PartialEq)]
pub struct PomdpModel {
    name: String,
    state_names: Vec<String>,
    observation_names: Vec<String>,
    actions: Vec<ActionSpec>,
    terminal_cost: Vec<f64>,
    discount: f64,
    horizon: usize,
    initial_belief: Option<Belief>,
    constraint: Option<ConstraintSchedule>,
}

/// Validates raw model data with the default row-sum tolerance.
pub fn validate_model(raw: &RawModel) -> Result<PomdpModel, ModelError> {
    validate_model_with_tolerance(raw, ROW_SUM_TOLERANCE)
}

pub fn validate_model_with_tolerance(
    raw: &RawModel,
    tolerance: f64,
) -> Result<PomdpModel, ModelError> {
    let n = raw.states.len();
    let m = raw.actions.len();
    let o = raw.observations.len();
    if n == 0 {
        return Err(ModelError::Empty("state"));
    }
    if m == 0 {
        return Err(ModelError::Empty("action"));
    }
    if o == 0 {
        return Err(ModelError::Empty("observation"));
    }
    if !raw.discount.is_finite() || raw.discount >= 1.0 {
        return Err(ModelError::DiscountTooLarge(raw.discount));
    }
    if raw.discount < 0.0 {
        return Err(ModelError::DiscountNegative(raw.discount));
    }

    let mut actions = Vec::with_capacity(m);
    for (a, ra) in raw.actions.iter().enumerate() {
        let transition = StochasticMatrix::from_rows(
            &format!("transition[{a}]"),
            &ra.transition,
            n,
            n,
            tolerance,
        )?;
        let observation = StochasticMatrix::from_rows(
            &format!("observation[{a}]"),
            &ra.observation,
            n,
            o,
            tolerance,
        )?;
        check_costs(&format!("cost[{a}]"), &ra.cost, n)?;
        actions.push(ActionSpec {
            name: ra.name.clone(),
            transition,
            observation,
            cost: ra.cost.clone(),
        });
    }
    check_costs("terminal_cost", &raw.terminal_cost, n)?;

    let initial_belief = raw
        .initial_belief
        .as_ref()
        .map(|w| Belief::with_len(w.clone(), n))
        .transpose()?;

    let constraint = raw
        .constraint
        .as_ref()
        .map(|c| ConstraintSchedule::from_raw(c, n, raw.horizon))
        .transpose()?;

    Ok(PomdpModel {
        name: raw.name.clone(),
        state_names: raw.states.clone(),
        observation_names: raw.observations.clone(),
        actions,
        terminal_cost: raw.terminal_cost.clone(),
        discount: raw.discount,
        horizon: raw.horizon,
        initial_belief,
        constraint,
    })
}

fn check_costs(what: &str, costs: &[f64], n: usize) -> Result<(), ModelError> {
    if costs.len() != n {
        return Err(ModelError::Dimension {
            what: what.to_string(),
            expected: n,
            found: costs.len(),
        });
    }
    for (index, &value) in costs.iter().enumerate() {
        if !value.is_finite() {
            return Err(ModelError::NonFinite {
                what: what.to_string(),
                index,
                value,
            });
        }
        if value < 0.0 {
            return Err(ModelError::NegativeCost {
                what: what.to_string(),
                index,
                value,
            });
        }
    }
    Ok(())
}

impl PomdpModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn n_observations(&self) -> usize {
        self.observation_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn observation_names(&self) -> &[String] {
        &self.observation_names
    }

    pub fn actions(&self) -> &[ActionSpec] {
        &self.actions
    }

    pub fn action(&self, a: usize) -> &ActionSpec {
        &self.actions[a]
    }

    pub fn transition(&self, a: usize) -> &StochasticMatrix {
        &self.actions[a].transition
    }

    pub fn observation(&self, a: usize) -> &StochasticMatrix {
        &self.actions[a].observation
    }

    pub fn cost(&self, a: usize) -> &[f64] {
        &self.actions[a].cost
    }

    pub fn terminal_cost(&self) -> &[f64] {
        &self.terminal_cost
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn initial_belief(&self) -> Option<&Belief> {
        self.initial_belief.as_ref()
    }

    /// The configured initial belief, or uniform when none is given.
    pub fn initial_belief_or_uniform(&self) -> Belief {
        self.initial_belief
            .clone()
            .unwrap_or_else(|| Belief::uniform(self.n_states()))
    }

    pub fn constraint(&self) -> Option<&ConstraintSchedule> {
        self.constraint.as_ref()
    }

    /// Largest stage cost over all actions and states.
    pub fn max_stage_cost(&self) -> f64 {
        self.actions
            .iter()
            .flat_map(|a| a.cost.iter().copied())
            .fold(0.0, f64::max)
    }

    /// Looks up an action by exact name.
    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a.name == name)
    }

    pub fn to_raw(&self) -> RawModel {
        RawModel {
            name: self.name.clone(),
            states: self.state_names.clone(),
            observations: self.observation_names.clone(),
            discount: self.discount,
            horizon: self.horizon,
            initial_belief: self.initial_belief.as_ref().map(|b| b.as_slice().to_vec()),
            actions: self
                .actions
                .iter()
                .map(|a| RawAction {
                    name: a.name.clone(),
                    transition: a.transition.to_nested(),
                    observation: a.observation.to_nested(),
                    cost: a.cost.clone(),
                })
                .collect(),
            terminal_cost: self.terminal_cost.clone(),
            constraint: self.constraint.as_ref().map(ConstraintSchedule::to_raw),
        }
    }

    /// SHA-256 (hex) over the canonical JSON encoding, initial belief
    /// excluded.
    pub fn fingerprint(&self) -> String {
        let mut raw = self.to_raw();
        raw.initial_belief = None;
        let json = serde_json::to_vec(&raw).expect("model serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Applies overrides and revalidates.
    pub fn with_overrides(
        &self,
        horizon: Option<usize>,
        discount: Option<f64>,
        initial_belief: Option<Vec<f64>>,
    ) -> Result<PomdpModel, ModelError> {
        let mut raw = self.to_raw();
        if let Some(h) = horizon {
            raw.horizon = h;
        }
        if let Some(d) = discount {
            raw.discount = d;
        }
        if let Some(b) = initial_belief {
            raw.initial_belief = Some(b);
        }
        validate_model(&raw)
    }

    /// Replaces the constraint schedule and revalidates.
    pub fn with_constraint(
        &self,
        constraint: Option<RawConstraint>,
    ) -> Result<PomdpModel, ModelError> {
        let mut raw = self.to_raw();
        raw.constraint = constraint;
        validate_model(&raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singleton() -> RawModel {
        RawModel {
            name: "singleton".into(),
            states: vec!["s".into()],
            observations: vec!["o".into()],
            discount: 0.5,
            horizon: 1,
            initial_belief: None,
            actions: vec![RawAction {
                name: "a".into(),
                transition: vec![vec![1.0]],
                observation: vec![vec![1.0]],
                cost: vec![0.0],
            }],
            terminal_cost: vec![0.0],
            constraint: None,
        }
    }

    #[test]
    fn degenerate_singleton_is_valid() {
        let m = validate_model(&singleton()).unwrap();
        assert_eq!((m.n_states(), m.n_actions(), m.n_observations()), (1, 1, 1));
    }

    #[test]
    fn healthcare_dimensions() {
        let m = builtin_healthcare_model();
        assert_eq!((m.n_states(), m.n_actions(), m.n_observations()), (3, 4, 3));
        assert_eq!(m.terminal_cost(), &[0.0, 8.0, 60.0]);
        assert_eq!(m.discount(), 0.85);
        assert_eq!(m.horizon(), 4);
        assert!(m.constraint().is_none());
    }

    #[test]
    fn row_sum_defect_is_reported() {
        let mut raw = builtin_healthcare_model().to_raw();
        raw.actions[0].transition[0] = vec![0.80, 0.21, 0.00];
        match validate_model(&raw) {
            Err(ModelError::RowSum {
                matrix,
                row,
                defect,
                ..
            }) => {
                assert_eq!(matrix, "transition[0]");
                assert_eq!(row, 0);
                assert!((defect - 0.01).abs() < 1e-12);
            }
            other => panic!("expected row-sum error, got {other:?}"),
        }
    }

    #[test]
    fn negative_probability_and_cost() {
        let mut raw = singleton();
        raw.actions[0].transition = vec![vec![-0.0000001]];
        assert!(matches!(
            validate_model(&raw),
            Err(ModelError::NegativeProbability { .. })
        ));
        let mut raw = singleton();
        raw.actions[0].cost = vec![-1.0];
        assert!(matches!(
            validate_model(&raw),
            Err(ModelError::NegativeCost { .. })
        ));
        let mut raw = singleton();
        raw.terminal_cost = vec![f64::INFINITY];
        assert!(matches!(
            validate_model(&raw),
            Err(ModelError::NonFinite { .. })
        ));
    }

    #[test]
    fn discount_bounds() {
        let mut raw = singleton();
        raw.discount = 1.0;
        let err = validate_model(&raw).unwrap_err();
        assert!(err.to_string().contains("discount must be < 1"));
        raw.discount = -0.1;
        assert!(matches!(
            validate_model(&raw),
            Err(ModelError::DiscountNegative(_))
        ));
        raw.discount = 0.0;
        assert!(validate_model(&raw).is_ok());
    }

    #[test]
    fn dimension_mismatch() {
        let mut raw = singleton();
        raw.actions[0].observation = vec![vec![0.5, 0.5]];
        assert!(matches!(
            validate_model(&raw),
            Err(ModelError::Dimension { .. })
        ));
        let mut raw = singleton();
        raw.terminal_cost = vec![];
        assert!(matches!(
            validate_model(&raw),
            Err(ModelError::Dimension { .. })
        ));
        let mut raw = singleton();
        raw.initial_belief = Some(vec![0.5, 0.5]);
        assert!(matches!(
            validate_model(&raw),
            Err(ModelError::InitialBelief(_))
        ));
    }

    #[test]
    fn empty_dimensions() {
        let mut raw = singleton();
        raw.actions.clear();
        assert!(matches!(
            validate_model(&raw),
            Err(ModelError::Empty("action"))
        ));
    }

    #[test]
    fn fingerprint_tracks_content() {
        let m = builtin_healthcare_model();
        let m2 = m.with_overrides(Some(3), None, None).unwrap();
        assert_eq!(m.fingerprint(), builtin_healthcare_model().fingerprint());
        assert_ne!(m.fingerprint(), m2.fingerprint());
        let m3 = m
            .with_overrides(None, None, Some(vec![0.0, 1.0, 0.0]))
            .unwrap();
        assert_eq!(m.fingerprint(), m3.fingerprint());
    }

    #[test]
    fn overrides_are_revalidated() {
        let m = builtin_healthcare_model();
        assert!(m.with_overrides(None, Some(1.5), None).is_err());
        assert!(m
            .with_overrides(None, None, Some(vec![1.0, -1.0, 1.0]))
            .is_err());
    }
}
