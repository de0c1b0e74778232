//! The three-stage chronic disease example: skip, appointment, rapid test,
//! treatment.

use super::{validate_model, PomdpModel, RawAction, RawModel};

const ONE_THIRD: f64 = 1.0 / 3.0;

fn progression() -> Vec<Vec<f64>> {
    vec![
        vec![0.80, 0.20, 0.00],
        vec![0.00, 0.90, 0.10],
        vec![0.00, 0.00, 1.00],
    ]
}

fn low_quality_assessment() -> Vec<Vec<f64>> {
    vec![
        vec![0.40, 0.30, 0.30],
        vec![0.30, 0.40, 0.30],
        vec![0.30, 0.30, 0.40],
    ]
}

pub(crate) fn healthcare_raw() -> RawModel {
    RawModel {
        name: "healthcare".into(),
        states: vec!["stage1".into(), "stage2".into(), "stage3".into()],
        observations: vec![
            "test_stage1".into(),
            "test_stage2".into(),
            "test_stage3".into(),
        ],
        discount: 0.85,
        horizon: 4,
        initial_belief: None,
        actions: vec![
            RawAction {
                name: "skip".into(),
                transition: progression(),
                observation: vec![vec![ONE_THIRD; 3]; 3],
                cost: vec![0.0, 5.0, 5.0],
            },
            RawAction {
                name: "appointment".into(),
                transition: progression(),
                observation: low_quality_assessment(),
                cost: vec![1.0, 1.0, 1.0],
            },
            RawAction {
                name: "rapid_test".into(),
                transition: vec![
                    vec![1.00, 0.00, 0.00],
                    vec![0.00, 1.00, 0.00],
                    vec![0.00, 0.00, 1.00],
                ],
                observation: vec![
                    vec![0.90, 0.05, 0.05],
                    vec![0.05, 0.90, 0.05],
                    vec![0.05, 0.05, 0.90],
                ],
                cost: vec![4.0, 3.0, 4.0],
            },
            RawAction {
                name: "treatment".into(),
                transition: vec![
                    vec![0.80, 0.20, 0.00],
                    vec![0.75, 0.25, 0.00],
                    vec![0.00, 0.00, 1.00],
                ],
                observation: low_quality_assessment(),
                cost: vec![4.0, 2.0, 4.0],
            },
        ],
        terminal_cost: vec![0.0, 8.0, 60.0],
        constraint: None,
    }
}

/// The healthcare decision-making model: 3 disease stages, 4 decisions,
/// 3 test outcomes, `c_N = [0, 8, 60]`, discount 0.85, horizon 4.
pub fn builtin_healthcare_model() -> PomdpModel {
    validate_model(&healthcare_raw()).expect("builtin healthcare model is valid")
}
