//! TOML files for fitted predictors and repair models.

use std::path::Path;

use fairdiff_core::repair::QuantileMap;
use fairdiff_core::{Predictor, PredictorKind, RepairModel};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PredictorFile {
    kind: String,
    intercept: f64,
    features: Vec<String>,
    weights: Vec<f64>,
}

/// A predictor together with the feature names it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedPredictor {
    pub predictor: Predictor,
    pub features: Vec<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Knots {
    values: Vec<f64>,
    positions: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RepairFile {
    lambda: f64,
    epsilon_target: f64,
    group_false: Knots,
    group_true: Knots,
    pooled: Knots,
}

fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string(value).map_err(|e| CliError::format(path, e.to_string()))?;
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn read_toml<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::format(path, e.to_string()))
}

pub fn save_predictor(path: &Path, saved: &SavedPredictor) -> Result<()> {
    let p = &saved.predictor;
    write_toml(
        path,
        &PredictorFile {
            kind: p.kind.as_str().to_string(),
            intercept: p.intercept,
            features: saved.features.clone(),
            weights: p.weights.clone(),
        },
    )
}

pub fn load_predictor(path: &Path) -> Result<SavedPredictor> {
    let file: PredictorFile = read_toml(path)?;
    let kind: PredictorKind = file
        .kind
        .parse()
        .map_err(|_| CliError::format(path, format!("unknown predictor kind `{}`", file.kind)))?;
    if file.features.len() != file.weights.len() {
        return Err(CliError::format(path, "`features` and `weights` differ in length"));
    }
    Ok(SavedPredictor {
        predictor: Predictor::new(kind, file.weights, file.intercept)?,
        features: file.features,
    })
}

fn knots(map: &QuantileMap) -> Knots {
    Knots {
        values: map.values().to_vec(),
        positions: map.positions().to_vec(),
    }
}

pub fn save_repair(path: &Path, model: &RepairModel) -> Result<()> {
    write_toml(
        path,
        &RepairFile {
            lambda: model.lambda(),
            epsilon_target: model.epsilon_target(),
            group_false: knots(model.group_map(false)),
            group_true: knots(model.group_map(true)),
            pooled: knots(model.pooled()),
        },
    )
}

pub fn load_repair(path: &Path) -> Result<RepairModel> {
    let file: RepairFile = read_toml(path)?;
    let map = |k: Knots| QuantileMap::from_knots(k.values, k.positions);
    Ok(RepairModel::from_parts(
        map(file.group_false)?,
        map(file.group_true)?,
        map(file.pooled)?,
        file.lambda,
        file.epsilon_target,
    )?)
}
