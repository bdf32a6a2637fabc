//! Global interpretation: importances, shape curves, convergence.
//!
//! A feature's importance is `|w_k|` times the spread of its booster's
//! output over the dataset, so it measures how much the feature actually
//! moves predictions rather than how large its nominal weight is. Shape
//! curves are the per-feature contribution functions, centered to zero mean
//! over the dataset so curves are comparable across features.


use serde::{Deserialize, Serialize};

use crate::data::{population_std, Dataset};
use crate::error::{Error, Result};
use crate::train::{AdditiveModel, TrainingHistory};

/// What spread multiplies the absolute weight in an importance score.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceBasis {
    /// Spread of the booster output `g_k(x)` over the dataset (default):
    /// insensitive to feature units, reflects the fitted contribution.
    ShapeValues,
    /// Spread of the raw feature column itself.
    FeatureValues,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImportanceReport {
    /// Non-negative importance per feature, dataset order.
    pub importance: Vec<f64>,
    /// The signed outer weights, for reference.
    pub weights: Vec<f64>,
    /// Feature indices sorted by decreasing importance; ties keep dataset
    /// order.
    pub ranking: Vec<usize>,
}

fn check_schema(model: &AdditiveModel, dataset: &Dataset) -> Result<()> {
    if model.feature_names != dataset.feature_names() {
        return Err(Error::SchemaMismatch(format!(
            "model features {:?} vs dataset features {:?}",
            model.feature_names,
            dataset.feature_names()
        )));
    }
    Ok(())
}

pub fn feature_importances(model: &AdditiveModel, dataset: &Dataset) -> Result<ImportanceReport> {
    feature_importances_with(model, dataset, ImportanceBasis::ShapeValues)
}

pub fn feature_importances_with(
    model: &AdditiveModel,
    dataset: &Dataset,
    basis: ImportanceBasis,
) -> Result<ImportanceReport> {
    check_schema(model, dataset)?;
    let importance: Vec<f64> = (0..model.n_features())
        .map(|k| {
            let spread = match basis {
                ImportanceBasis::ShapeValues => {
                    let shaped: Vec<f64> = dataset
                        .column(k)
                        .unwrap()
                        .iter()
                        .map(|&x| model.gbms[k].predict_one(x))
                        .collect();
                    population_std(&shaped)
                }
                ImportanceBasis::FeatureValues => {
                    population_std(&dataset.column(k).unwrap().to_vec())
                }
            };
            model.weights[k].abs() * spread
        })
        .collect();

    let mut ranking: Vec<usize> = (0..importance.len()).collect();
    ranking.sort_by(|&a, &b| importance[b].total_cmp(&importance[a]));

    Ok(ImportanceReport {
        importance,
        weights: model.weights.to_vec(),
        ranking,
    })
}

/// One feature's contribution curve on an evenly spaced grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShapeTable {
    pub feature_index: usize,
    pub feature_name: String,
    /// Evenly spaced over the feature's observed range, endpoints included.
    pub grid: Vec<f64>,
    /// `w_k * (g_k(grid point) - dataset mean of g_k)`, or its `[0, 1]`
    /// rescaling when requested.
    pub contribution: Vec<f64>,
    /// Dataset mean of the raw booster output, the centering constant.
    pub dataset_mean: f64,
    /// The outer weight applied to this shape.
    pub weight: f64,
    /// Set when the curve is constant over the grid (then a scaled table is
    /// all zeros rather than an arbitrary rescaling).
    pub constant: bool,
}

pub fn export_shape(
    model: &AdditiveModel,
    dataset: &Dataset,
    feature: usize,
    grid_size: usize,
    scaled: bool,
) -> Result<ShapeTable> {
    check_schema(model, dataset)?;
    if grid_size < 2 {
        return Err(Error::invalid(
            "grid size",
            format!("must be at least 2, got {grid_size}"),
        ));
    }
    let column = dataset.column(feature)?;
    let min = column.iter().copied().fold(f64::INFINITY, f64::min);
    let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let gbm = &model.gbms[feature];
    let weight = model.weights[feature];
    let dataset_mean = column.iter().map(|&x| gbm.predict_one(x)).sum::<f64>() / column.len() as f64;

    let grid: Vec<f64> = (0..grid_size)
        .map(|i| min + (max - min) * i as f64 / (grid_size - 1) as f64)
        .collect();
    let mut contribution: Vec<f64> = grid
        .iter()
        .map(|&x| weight * (gbm.predict_one(x) - dataset_mean))
        .collect();

    let lo = contribution.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = contribution.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let constant = hi - lo == 0.0;
    if scaled {
        if constant {
            contribution.iter_mut().for_each(|c| *c = 0.0);
        } else {
            contribution.iter_mut().for_each(|c| *c = (*c - lo) / (hi - lo));
        }
    }

    Ok(ShapeTable {
        feature_index: feature,
        feature_name: dataset.feature_names()[feature].clone(),
        grid,
        contribution,
        dataset_mean,
        weight,
        constant,
    })
}

/// Weight-trajectory stability over the trailing window.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConvergenceDiagnostic {
    pub window: usize,
    pub threshold: f64,
    /// Worst per-feature ratio of weight spread to mean absolute weight
    /// within the window.
    pub relative_drift: f64,
    pub stabilized: bool,
}

/// Features whose window-mean |weight| falls below this fraction of the
/// largest one are left out of the drift ratio: weights the penalized fit has
/// zeroed out decay geometrically and their spread-to-mean ratio is
/// noise around 0/0 rather than evidence of instability.
const NEAR_ZERO_FRACTION: f64 = 1e-6;

/// Default trailing window for a run of `iterations` iterations.
pub fn default_window(iterations: usize) -> usize {
    (iterations / 5).max(10).min(iterations.max(1))
}

pub const DEFAULT_DRIFT_THRESHOLD: f64 = 0.05;

pub fn convergence_check(
    history: &TrainingHistory,
    window: usize,
    threshold: f64,
) -> Result<ConvergenceDiagnostic> {
    let iterations = history.weights.nrows();
    if window == 0 || window > iterations {
        return Err(Error::invalid(
            "window",
            format!("must be in 1..={iterations}, got {window}"),
        ));
    }
    if !(threshold > 0.0) || !threshold.is_finite() {
        return Err(Error::invalid(
            "threshold",
            format!("must be finite and > 0, got {threshold}"),
        ));
    }

    let tail = history.weights.slice(ndarray::s![iterations - window.., ..]);
    let m = tail.ncols();
    let mut mean_abs = vec![0.0f64; m];
    let mut spread = vec![0.0f64; m];
    for k in 0..m {
        let column: Vec<f64> = tail.column(k).to_vec();
        mean_abs[k] = column.iter().map(|w| w.abs()).sum::<f64>() / window as f64;
        spread[k] = population_std(&column);
    }
    let scale = mean_abs.iter().copied().fold(0.0f64, f64::max);
    let relative_drift = if scale == 0.0 {
        0.0
    } else {
        mean_abs
            .iter()
            .zip(&spread)
            .filter(|(&mu, _)| mu >= NEAR_ZERO_FRACTION * scale)
            .map(|(&mu, &sigma)| sigma / mu)
            .fold(0.0f64, f64::max)
    };

    Ok(ConvergenceDiagnostic {
        window,
        threshold,
        relative_drift,
        stabilized: relative_drift < threshold,
    })
}
