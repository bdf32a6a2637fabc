//! Versioned JSON persistence for trained models.
//!
//! The file stores everything needed to reproduce predictions exactly:
//! format version, task, feature names, target statistics, outer weights,
//! intercept, learning rate, and per-feature stump arrays as
//! `[threshold, left, right]` triples. Floats are written in shortest
//! round-trip form, so a load followed by a save is lossless.

use std::fs;
use std::path::Path;

use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::{AdditiveModel, Task};
use crate::data::StandardizationStats;
use crate::error::{Error, Result};
use crate::gbm::FeatureGbm;
use crate::stump::Stump;

pub const MODEL_FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u64,
    task: Task,
    feature_names: Vec<String>,
    target_stats: Option<StandardizationStats>,
    weights: Vec<f64>,
    intercept: f64,
    learning_rate: f64,
    stumps: Vec<Vec<[f64; 3]>>,
}

pub fn save_model(model: &AdditiveModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let json = model_to_json(model)?;
    fs::write(path, json).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Render a model in the same JSON format [`save_model`] writes.
pub fn model_to_json(model: &AdditiveModel) -> Result<String> {
    let learning_rate = model
        .gbms
        .first()
        .map(|g| g.learning_rate())
        .ok_or(Error::Empty { what: "model" })?;
    if model.gbms.iter().any(|g| g.learning_rate() != learning_rate) {
        return Err(Error::invalid(
            "model",
            "boosters disagree on the learning rate",
        ));
    }
    let file = ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        task: model.task,
        feature_names: model.feature_names.clone(),
        target_stats: model.target_stats,
        weights: model.weights.to_vec(),
        intercept: model.intercept,
        learning_rate,
        stumps: model
            .gbms
            .iter()
            .map(|g| {
                g.stumps()
                    .iter()
                    .map(|s| [s.threshold, s.left, s.right])
                    .collect()
            })
            .collect(),
    };
    let mut json = serde_json::to_string(&file).map_err(|e| Error::invalid("model", e.to_string()))?;
    json.push('\n');
    Ok(json)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<AdditiveModel> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    model_from_json(&content)
}

pub(crate) fn model_from_json(content: &str) -> Result<AdditiveModel> {
    let value: serde_json::Value =
        serde_json::from_str(content).map_err(|e| parse_error(content, e))?;
    let version = value
        .get("format_version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| Error::invalid("model file", "missing format_version field"))?;
    if version != MODEL_FORMAT_VERSION {
        return Err(Error::ModelVersion {
            found: version,
            expected: MODEL_FORMAT_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(value)
        .map_err(|e| Error::invalid("model file", e.to_string()))?;

    let m = file.feature_names.len();
    if file.weights.len() != m || file.stumps.len() != m {
        return Err(Error::invalid(
            "model file",
            format!(
                "inconsistent sizes: {} names, {} weights, {} stump lists",
                m,
                file.weights.len(),
                file.stumps.len()
            ),
        ));
    }
    match (file.task, &file.target_stats) {
        (Task::Regression, None) => {
            return Err(Error::invalid(
                "model file",
                "regression model without target statistics",
            ))
        }
        (Task::Regression, Some(stats)) if !(stats.std > 0.0) => {
            return Err(Error::invalid(
                "model file",
                "target standard deviation must be positive",
            ))
        }
        (Task::Classification, Some(_)) => {
            return Err(Error::invalid(
                "model file",
                "classification model carries target statistics",
            ))
        }
        _ => {}
    }

    let gbms: Vec<FeatureGbm> = file
        .stumps
        .iter()
        .enumerate()
        .map(|(k, triples)| {
            let stumps: Vec<Stump> = triples
                .iter()
                .map(|&[threshold, left, right]| Stump {
                    threshold,
                    left,
                    right,
                })
                .collect();
            FeatureGbm::from_stumps(k, file.learning_rate, stumps)
        })
        .collect::<Result<_>>()?;

    Ok(AdditiveModel {
        task: file.task,
        feature_names: file.feature_names,
        gbms,
        weights: Array1::from_vec(file.weights),
        intercept: file.intercept,
        target_stats: file.target_stats,
    })
}

fn parse_error(content: &str, e: serde_json::Error) -> Error {
    let line = e.line();
    let column = e.column();
    let offset = content
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum::<usize>()
        + column.saturating_sub(1);
    Error::ModelParse {
        offset,
        line,
        column,
        message: e.to_string(),
    }
}
