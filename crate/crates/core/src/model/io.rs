//! JSON model files. Indices in files are 0-based.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{validate_model, ModelError, PomdpModel};

/// Unvalidated model data, mirroring the on-disk schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawModel {
    pub name: String,
    pub states: Vec<String>,
    pub observations: Vec<String>,
    pub discount: f64,
    pub horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_belief: Option<Vec<f64>>,
    pub actions: Vec<RawAction>,
    pub terminal_cost: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<RawConstraint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAction {
    pub name: String,
    pub transition: Vec<Vec<f64>>,
    pub observation: Vec<Vec<f64>>,
    pub cost: Vec<f64>,
}

/// A single stage-uniform constraint object, or one object per stage `0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawConstraint {
    Uniform(RawStageConstraint),
    PerStage(Vec<RawStageConstraint>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawStageConstraint {
    pub safe_states: Vec<usize>,
    pub epsilon: f64,
}

impl RawModel {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

pub fn load_model(path: impl AsRef<Path>) -> Result<PomdpModel, ModelError> {
    let text = fs::read_to_string(path)?;
    validate_model(&RawModel::from_json(&text)?)
}

pub fn save_model(model: &PomdpModel, path: impl AsRef<Path>) -> Result<(), ModelError> {
    let json = serde_json::to_string_pretty(&model.to_raw()).expect("model serializes");
    fs::write(path, json)?;
    Ok(())
}
