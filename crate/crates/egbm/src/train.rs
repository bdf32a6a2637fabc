//! Joint training of the additive model.
//!
//! Each outer iteration appends one stump (or a short burst of them) to every
//! feature's booster against the current residuals, re-fits the outer weights
//! with an L1-penalized solve on the booster outputs, and smooths the new
//! weights into the old ones. Residuals are the negative loss gradient:
//! `y - prediction` for half-squared error, `label - sigmoid(score)` for
//! cross-entropy.
//!
//! Regression targets are standardized internally (the statistics ride along
//! in the model and predictions are mapped back). Classification keeps raw
//! 0/1 labels, scores through a fixed base log-odds intercept, and gives each
//! booster a short solo warm-up before joint training so the penalized solve
//! sees informative columns.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::data::{standardize_targets, Dataset, StandardizationStats};
use crate::error::{Error, Result};
use crate::gbm::FeatureGbm;
use crate::lasso;
use crate::rng::{RngStream, StreamId};

const TRAIN_LASSO_TOL: f64 = 1e-8;
const TRAIN_LASSO_SWEEPS: usize = 1000;
/// Probability clamp for the cross-entropy loss.
const PROB_EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Regression,
    Classification,
}

/// How the per-iteration weight fit chooses its penalty.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LassoMode {
    /// k-fold cross-validation over a log-spaced grid re-run every iteration.
    CrossValidated { folds: usize, grid_size: usize },
    /// A fixed penalty, `0.0` meaning plain least squares.
    Fixed { lambda: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Outer iterations; one stump burst per feature each.
    pub iterations: usize,
    /// Weight smoothing factor in (0, 1]; 1 disables smoothing.
    pub alpha: f64,
    /// Shrinkage applied to every stump, in (0, 1].
    pub learning_rate: f64,
    /// Stumps appended per feature within one outer iteration.
    pub inner_steps: usize,
    pub lasso: LassoMode,
    pub task: Task,
    /// Solo warm-up stumps per booster before classification training.
    pub pretrain_steps: usize,
    pub seed: u64,
    /// Fit each feature's stumps to `residual * weight^2` instead of
    /// `residual * weight` (the doubly-weighted variant).
    pub literal_weighted_targets: bool,
    /// Give the weight fit the previous residuals as targets instead of the
    /// original (standardized) targets.
    pub lasso_on_residuals: bool,
    /// Start from zero residuals, spending the first iteration on zero
    /// targets, instead of starting from the targets themselves.
    pub zero_residual_init: bool,
    /// Override the per-feature random stream identity. Defaults to column
    /// position; supplying stable ids keeps stump draws attached to features
    /// when columns are reordered.
    pub feature_stream_ids: Option<Vec<u64>>,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 100,
            alpha: 0.3,
            learning_rate: 0.1,
            inner_steps: 1,
            lasso: LassoMode::CrossValidated {
                folds: 5,
                grid_size: lasso::DEFAULT_GRID_SIZE,
            },
            task: Task::Regression,
            pretrain_steps: 10,
            seed: 0,
            literal_weighted_targets: false,
            lasso_on_residuals: false,
            zero_residual_init: false,
            feature_stream_ids: None,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations", "must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(
                "alpha",
                format!("must be in (0, 1], got {}", self.alpha),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(Error::invalid(
                "learning rate",
                format!("must be in (0, 1], got {}", self.learning_rate),
            ));
        }
        if self.inner_steps == 0 {
            return Err(Error::invalid("inner steps", "must be at least 1"));
        }
        match self.lasso {
            LassoMode::CrossValidated { folds, grid_size } => {
                if folds < 2 {
                    return Err(Error::invalid("fold count", "must be at least 2"));
                }
                if grid_size == 0 {
                    return Err(Error::invalid("grid size", "must be at least 1"));
                }
            }
            LassoMode::Fixed { lambda } => {
                if !(lambda >= 0.0) || !lambda.is_finite() {
                    return Err(Error::invalid(
                        "lambda",
                        format!("must be finite and >= 0, got {lambda}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Negative gradient of the half-squared loss: `target - prediction`.
pub fn compute_residuals_l2(targets: &[f64], predictions: &[f64]) -> Result<Vec<f64>> {
    if targets.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            what: "targets vs predictions",
            left: targets.len(),
            right: predictions.len(),
        });
    }
    Ok(targets
        .iter()
        .zip(predictions)
        .map(|(t, p)| t - p)
        .collect())
}

/// Negative gradient of the cross-entropy loss in score space:
/// `label - sigmoid(score)`.
pub fn compute_residuals_logistic(labels: &[f64], scores: &[f64]) -> Result<Vec<f64>> {
    if labels.len() != scores.len() {
        return Err(Error::LengthMismatch {
            what: "labels vs scores",
            left: labels.len(),
            right: scores.len(),
        });
    }
    if let Some(&bad) = labels.iter().find(|&&l| l != 0.0 && l != 1.0) {
        return Err(Error::NonBinaryLabel(bad));
    }
    Ok(labels
        .iter()
        .zip(scores)
        .map(|(l, z)| l - sigmoid(*z))
        .collect())
}

/// Stump-fitting targets for one feature: the shared residuals scaled by the
/// feature's outer weight.
pub fn per_feature_targets(residuals: &[f64], weight: f64) -> Vec<f64> {
    residuals.iter().map(|r| r * weight).collect()
}

/// Exponential smoothing of the outer weights:
/// `(1 - alpha) * previous + alpha * fitted`.
pub fn update_weights(
    previous: ArrayView1<'_, f64>,
    fitted: ArrayView1<'_, f64>,
    alpha: f64,
) -> Result<Array1<f64>> {
    if previous.len() != fitted.len() {
        return Err(Error::LengthMismatch {
            what: "weight vectors",
            left: previous.len(),
            right: fitted.len(),
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid(
            "alpha",
            format!("must be in (0, 1], got {alpha}"),
        ));
    }
    Ok(previous
        .iter()
        .zip(fitted.iter())
        .map(|(p, f)| (1.0 - alpha) * p + alpha * f)
        .collect())
}

/// The trained additive model: one booster per feature, outer weights, and
/// an intercept, plus what is needed to map predictions back to the original
/// target scale.
#[derive(Clone, Debug)]
pub struct AdditiveModel {
    pub task: Task,
    pub feature_names: Vec<String>,
    pub gbms: Vec<FeatureGbm>,
    pub weights: Array1<f64>,
    pub intercept: f64,
    /// Present for regression models (whose internals work on standardized
    /// targets); absent for classification.
    pub target_stats: Option<StandardizationStats>,
}

impl AdditiveModel {
    pub fn n_features(&self) -> usize {
        self.gbms.len()
    }

    /// Additive score of one row: intercept plus weighted booster outputs.
    /// For regression this is in standardized target units; for
    /// classification it is the logit.
    pub fn raw_score_row(&self, row: ArrayView1<'_, f64>) -> Result<f64> {
        if row.len() != self.n_features() {
            return Err(Error::LengthMismatch {
                what: "row vs model features",
                left: row.len(),
                right: self.n_features(),
            });
        }
        let mut score = self.intercept;
        for (gbm, (&w, &x)) in self.gbms.iter().zip(self.weights.iter().zip(row.iter())) {
            score += w * gbm.predict_one(x);
        }
        Ok(score)
    }

    pub fn raw_scores(&self, features: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        features
            .rows()
            .into_iter()
            .map(|row| self.raw_score_row(row))
            .collect()
    }

    /// Predictions on the original target scale: destandardized values for
    /// regression, class-1 probabilities for classification.
    pub fn predict(&self, features: ArrayView2<'_, f64>) -> Result<Array1<f64>> {
        let scores = self.raw_scores(features)?;
        Ok(match self.task {
            Task::Regression => match &self.target_stats {
                Some(stats) => scores.mapv(|z| stats.destandardize(z)),
                None => scores,
            },
            Task::Classification => scores.mapv(sigmoid),
        })
    }
}

/// Per-iteration record of the training run.
#[derive(Clone, Debug)]
pub struct TrainingHistory {
    /// Smoothed outer weights after each iteration, one row per iteration.
    pub weights: Array2<f64>,
    /// Raw penalized-fit outputs before smoothing, one row per iteration.
    pub fitted_weights: Array2<f64>,
    /// Mean training loss after each iteration (half-squared error or
    /// cross-entropy, on the scale training works in).
    pub loss: Vec<f64>,
}

struct FitFeatureJob<'a> {
    gbm: &'a mut FeatureGbm,
    shape_col: &'a mut Vec<f64>,
    col: &'a [f64],
    stream_id: u64,
}

pub fn train(dataset: &Dataset, config: &TrainConfig) -> Result<(AdditiveModel, TrainingHistory)> {
    config.validate()?;
    let n = dataset.n_rows();
    let m = dataset.n_features();

    let stream_ids: Vec<u64> = match &config.feature_stream_ids {
        Some(ids) => {
            if ids.len() != m {
                return Err(Error::LengthMismatch {
                    what: "stream ids vs features",
                    left: ids.len(),
                    right: m,
                });
            }
            for (idx, id) in ids.iter().enumerate() {
                if ids[..idx].contains(id) {
                    return Err(Error::invalid(
                        "stream ids",
                        format!("id {id} appears more than once"),
                    ));
                }
            }
            ids.clone()
        }
        None => (0..m as u64).collect(),
    };

    // Working targets: standardized for regression, raw labels for
    // classification (with the base rate folded into a fixed log-odds).
    let (work_targets, target_stats, base_score) = match config.task {
        Task::Regression => {
            let (standardized, stats) = standardize_targets(dataset.targets())?;
            (standardized.to_vec(), Some(stats), 0.0)
        }
        Task::Classification => {
            if let Some(&bad) = dataset.targets().iter().find(|&&l| l != 0.0 && l != 1.0) {
                return Err(Error::NonBinaryLabel(bad));
            }
            let positive_rate = dataset.targets().mean().unwrap();
            if positive_rate == 0.0 || positive_rate == 1.0 {
                return Err(Error::DegenerateTargets);
            }
            let base = (positive_rate / (1.0 - positive_rate)).ln();
            (dataset.targets().to_vec(), None, base)
        }
    };

    let cols: Vec<Vec<f64>> = (0..m).map(|k| dataset.features().column(k).to_vec()).collect();

    let mut gbms: Vec<FeatureGbm> = (0..m)
        .map(|k| FeatureGbm::new(k, config.learning_rate))
        .collect::<Result<_>>()?;
    if config.task == Task::Classification && config.pretrain_steps > 0 {
        for (gbm, (col, &sid)) in gbms.iter_mut().zip(cols.iter().zip(&stream_ids)) {
            let mut stream = RngStream::new(config.seed, StreamId::pretrain(sid));
            gbm.pretrain_classification(col, &work_targets, config.pretrain_steps, &mut stream)?;
        }
    }

    // Cached booster outputs at the training rows, maintained incrementally.
    let mut shape_cols: Vec<Vec<f64>> = gbms
        .iter()
        .zip(&cols)
        .map(|(gbm, col)| gbm.predict(col))
        .collect();

    let mut weights: Array1<f64> = Array1::ones(m);
    let mut residuals: Vec<f64> = if config.zero_residual_init {
        vec![0.0; n]
    } else {
        let scores = assemble_scores(&shape_cols, &weights, base_score, n);
        match config.task {
            Task::Regression => compute_residuals_l2(&work_targets, &scores)?,
            Task::Classification => compute_residuals_logistic(&work_targets, &scores)?,
        }
    };

    let mut history_weights = Array2::zeros((config.iterations, m));
    let mut history_fitted = Array2::zeros((config.iterations, m));
    let mut history_loss = Vec::with_capacity(config.iterations);

    for iteration in 1..=config.iterations {
        let jobs: Vec<FitFeatureJob> = gbms
            .iter_mut()
            .zip(shape_cols.iter_mut())
            .zip(cols.iter())
            .zip(stream_ids.iter())
            .map(|(((gbm, shape_col), col), &stream_id)| FitFeatureJob {
                gbm,
                shape_col,
                col,
                stream_id,
            })
            .collect();
        run_feature_jobs(jobs, &weights, &residuals, iteration as u64, config)?;

        let design = Array2::from_shape_fn((n, m), |(i, k)| shape_cols[k][i]);
        let lasso_targets: ArrayView1<'_, f64> = if config.lasso_on_residuals {
            ArrayView1::from(&residuals)
        } else {
            ArrayView1::from(&work_targets)
        };
        let fitted = fit_outer_weights(design.view(), lasso_targets, config, iteration as u64)?;

        weights = update_weights(weights.view(), fitted.view(), config.alpha)?;

        let scores = assemble_scores(&shape_cols, &weights, base_score, n);
        let loss = match config.task {
            Task::Regression => {
                residuals = compute_residuals_l2(&work_targets, &scores)?;
                residuals.iter().map(|r| 0.5 * r * r).sum::<f64>() / n as f64
            }
            Task::Classification => {
                residuals = compute_residuals_logistic(&work_targets, &scores)?;
                work_targets
                    .iter()
                    .zip(&scores)
                    .map(|(&label, &z)| {
                        let p = sigmoid(z).clamp(PROB_EPS, 1.0 - PROB_EPS);
                        -(label * p.ln() + (1.0 - label) * (1.0 - p).ln())
                    })
                    .sum::<f64>()
                    / n as f64
            }
        };
        if !loss.is_finite() {
            return Err(Error::NonFinite {
                context: format!("training loss at iteration {iteration}"),
            });
        }

        history_weights.row_mut(iteration - 1).assign(&weights);
        history_fitted.row_mut(iteration - 1).assign(&fitted);
        history_loss.push(loss);
    }

    let intercept = base_score
        - weights
            .iter()
            .zip(&shape_cols)
            .map(|(&w, col)| w * mean(col))
            .sum::<f64>();

    let model = AdditiveModel {
        task: config.task,
        feature_names: dataset.feature_names().to_vec(),
        gbms,
        weights,
        intercept,
        target_stats,
    };
    let history = TrainingHistory {
        weights: history_weights,
        fitted_weights: history_fitted,
        loss: history_loss,
    };
    Ok((model, history))
}

/// Scores at the training rows from cached booster outputs: the base score
/// plus weighted, dataset-centered booster outputs. Centering per column
/// makes the implied intercept the least-squares-optimal one for regression
/// and keeps the classification base rate honest.
fn assemble_scores(shape_cols: &[Vec<f64>], weights: &Array1<f64>, base: f64, n: usize) -> Vec<f64> {
    let mut scores = vec![base; n];
    for (col, &w) in shape_cols.iter().zip(weights.iter()) {
        let mu = mean(col);
        for (s, &g) in scores.iter_mut().zip(col) {
            *s += w * (g - mu);
        }
    }
    scores
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn fit_outer_weights(
    design: ArrayView2<'_, f64>,
    targets: ArrayView1<'_, f64>,
    config: &TrainConfig,
    iteration: u64,
) -> Result<Array1<f64>> {
    match config.lasso {
        LassoMode::Fixed { lambda } => Ok(lasso::lasso_fit(
            design,
            targets,
            lambda,
            TRAIN_LASSO_TOL,
            TRAIN_LASSO_SWEEPS,
        )?
        .weights),
        LassoMode::CrossValidated { folds, grid_size } => {
            let top = lasso::lambda_max(design, targets)?;
            if !(top > 0.0) {
                // No column carries signal (e.g. all boosters still flat):
                // every penalty gives the null model.
                return Ok(Array1::zeros(design.ncols()));
            }
            let grid = lasso::default_lambda_grid(top, grid_size);
            let folds = folds.min(design.nrows());
            let mut stream = RngStream::new(config.seed, StreamId::folds(iteration));
            Ok(lasso::lasso_cv(
                design,
                targets,
                folds,
                &grid,
                &mut stream,
                TRAIN_LASSO_TOL,
                TRAIN_LASSO_SWEEPS,
            )?
            .solution
            .weights)
        }
    }
}

fn fit_one_feature(
    job: FitFeatureJob<'_>,
    weight: f64,
    residuals: &[f64],
    iteration: u64,
    config: &TrainConfig,
) -> Result<()> {
    let effective_weight = if config.literal_weighted_targets {
        weight * weight
    } else {
        weight
    };
    let targets = per_feature_targets(residuals, effective_weight);
    let lr = config.learning_rate;
    if config.inner_steps == 1 {
        let mut stream = RngStream::new(config.seed, StreamId::stump(job.stream_id, iteration, 0));
        let stump = job.gbm.append_step(job.col, &targets, &mut stream)?;
        for (g, &x) in job.shape_col.iter_mut().zip(job.col) {
            *g += lr * stump.predict(x);
        }
    } else {
        // `working` tracks target minus the contribution accumulated within
        // this outer iteration, so each inner stump fits what is left.
        let mut working = targets;
        for step in 0..config.inner_steps {
            let mut stream = RngStream::new(
                config.seed,
                StreamId::stump(job.stream_id, iteration, step as u64),
            );
            let stump = job.gbm.append_step(job.col, &working, &mut stream)?;
            for ((g, w), &x) in job.shape_col.iter_mut().zip(working.iter_mut()).zip(job.col) {
                let delta = lr * stump.predict(x);
                *g += delta;
                *w -= delta;
            }
        }
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn run_feature_jobs(
    jobs: Vec<FitFeatureJob<'_>>,
    weights: &Array1<f64>,
    residuals: &[f64],
    iteration: u64,
    config: &TrainConfig,
) -> Result<()> {
    use rayon::prelude::*;
    jobs.into_par_iter().try_for_each(|job| {
        let weight = weights[job.gbm.feature_index()];
        fit_one_feature(job, weight, residuals, iteration, config)
    })
}

#[cfg(not(feature = "parallel"))]
fn run_feature_jobs(
    jobs: Vec<FitFeatureJob<'_>>,
    weights: &Array1<f64>,
    residuals: &[f64],
    iteration: u64,
    config: &TrainConfig,
) -> Result<()> {
    for job in jobs {
        let weight = weights[job.gbm.feature_index()];
        fit_one_feature(job, weight, residuals, iteration, config)?;
    }
    Ok(())
}

mod persist;
pub use persist::{load_model, model_to_json, save_model};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::gen_linear;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    fn small_config(iterations: usize, seed: u64) -> TrainConfig {
        TrainConfig {
            iterations,
            seed,
            lasso: LassoMode::Fixed { lambda: 0.0 },
            ..TrainConfig::default()
        }
    }

    #[test]
    fn sigmoid_is_stable_and_symmetric() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(800.0) <= 1.0 && sigmoid(800.0) > 0.999);
        assert!(sigmoid(-800.0) >= 0.0 && sigmoid(-800.0) < 1e-300);
        for z in [-3.0, -0.7, 0.2, 5.0] {
            assert_abs_diff_eq!(sigmoid(z) + sigmoid(-z), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn l2_residuals_are_signed_errors() {
        let r = compute_residuals_l2(&[1.0, 2.0, 3.0], &[0.5, 2.0, 4.0]).unwrap();
        assert_eq!(r, vec![0.5, 0.0, -1.0]);
    }

    #[test]
    fn logistic_residuals_at_zero_score_are_half() {
        let r = compute_residuals_logistic(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(r, vec![0.5, -0.5]);
        assert!(matches!(
            compute_residuals_logistic(&[0.5], &[0.0]).unwrap_err(),
            Error::NonBinaryLabel(_)
        ));
    }

    #[test]
    fn per_feature_targets_scale_residuals() {
        assert_eq!(per_feature_targets(&[1.0, -2.0], 0.5), vec![0.5, -1.0]);
        assert_eq!(per_feature_targets(&[1.0, -2.0], 0.0), vec![0.0, -0.0]);
    }

    #[test]
    fn weight_update_interpolates() {
        let w = update_weights(
            array![1.0, 0.0].view(),
            array![0.0, 1.0].view(),
            0.3,
        )
        .unwrap();
        assert_abs_diff_eq!(w[0], 0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(w[1], 0.3, epsilon = 1e-15);
        // alpha = 1 forgets the previous weights entirely
        let w = update_weights(array![5.0].view(), array![2.0].view(), 1.0).unwrap();
        assert_eq!(w[0], 2.0);
        assert!(update_weights(array![1.0].view(), array![1.0].view(), 0.0).is_err());
    }

    #[test]
    fn config_validation_rejects_bad_ranges() {
        let mut c = TrainConfig::default();
        c.alpha = 1.5;
        assert!(c.validate().is_err());
        let mut c = TrainConfig::default();
        c.iterations = 0;
        assert!(c.validate().is_err());
        let mut c = TrainConfig::default();
        c.lasso = LassoMode::Fixed { lambda: -0.1 };
        assert!(c.validate().is_err());
        let mut c = TrainConfig::default();
        c.lasso = LassoMode::CrossValidated { folds: 1, grid_size: 20 };
        assert!(c.validate().is_err());
    }

    #[test]
    fn first_iteration_with_full_alpha_keeps_the_fitted_weights() {
        let data = gen_linear(120, 0.05, 3).unwrap();
        let mut config = small_config(1, 3);
        config.alpha = 1.0;
        let (_, history) = train(&data, &config).unwrap();
        for k in 0..7 {
            assert_eq!(history.weights[[0, k]], history.fitted_weights[[0, k]]);
        }
        assert_eq!(history.loss.len(), 1);
    }

    #[test]
    fn history_rows_satisfy_the_smoothing_recurrence() {
        let data = gen_linear(150, 0.05, 9).unwrap();
        let mut config = small_config(12, 9);
        config.alpha = 0.3;
        let (_, history) = train(&data, &config).unwrap();
        // Row 0 blends the all-ones start.
        for k in 0..7 {
            let expected = 0.7 * 1.0 + 0.3 * history.fitted_weights[[0, k]];
            assert_eq!(history.weights[[0, k]], expected);
        }
        for s in 1..12 {
            for k in 0..7 {
                let expected =
                    0.7 * history.weights[[s - 1, k]] + 0.3 * history.fitted_weights[[s, k]];
                assert_eq!(history.weights[[s, k]], expected);
            }
        }
    }

    #[test]
    fn single_feature_regression_recovers_the_signal() {
        use crate::data::population_std;
        use rand::Rng;
        let mut rng = RngStream::new(5, StreamId::synth_features());
        let n = 500;
        let xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let noise: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() - 0.5) * 0.02).collect();
        let ys: Vec<f64> = xs.iter().zip(&noise).map(|(x, e)| 5.0 * x + e).collect();
        let data = Dataset::new(
            Array2::from_shape_vec((n, 1), xs.clone()).unwrap(),
            Array1::from_vec(ys.clone()),
            vec!["x1".into()],
        )
        .unwrap();
        let config = small_config(100, 5);
        let (model, _) = train(&data, &config).unwrap();

        let predictions = model.predict(data.features()).unwrap();
        let mean_y = ys.iter().sum::<f64>() / n as f64;
        let sse: f64 = ys.iter().zip(&predictions).map(|(y, p)| (y - p).powi(2)).sum();
        let sst: f64 = ys.iter().map(|y| (y - mean_y).powi(2)).sum();
        let r2 = 1.0 - sse / sst;
        assert!(r2 >= 0.95, "r2 = {r2}");

        // The fitted contribution w * g(x) should have slope ~ 5 / std(y)
        // in standardized units; recover it by least squares on the shape.
        let contribs: Vec<f64> = xs
            .iter()
            .map(|&x| model.weights[0] * model.gbms[0].predict_one(x))
            .collect();
        let mx = xs.iter().sum::<f64>() / n as f64;
        let mc = contribs.iter().sum::<f64>() / n as f64;
        let cov: f64 = xs.iter().zip(&contribs).map(|(x, c)| (x - mx) * (c - mc)).sum();
        let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let slope = cov / var;
        let expected = 5.0 / population_std(&ys);
        assert!(
            (slope - expected).abs() < 0.15 * expected.abs(),
            "slope {slope} vs expected {expected}"
        );
    }

    #[test]
    fn training_is_deterministic_bit_for_bit() {
        let data = gen_linear(200, 0.05, 11).unwrap();
        let config = TrainConfig {
            iterations: 15,
            seed: 11,
            ..TrainConfig::default()
        };
        let (model_a, history_a) = train(&data, &config).unwrap();
        let (model_b, history_b) = train(&data, &config).unwrap();
        assert_eq!(model_a.intercept.to_bits(), model_b.intercept.to_bits());
        for k in 0..7 {
            assert_eq!(model_a.weights[k].to_bits(), model_b.weights[k].to_bits());
            for (sa, sb) in model_a.gbms[k].stumps().iter().zip(model_b.gbms[k].stumps()) {
                assert_eq!(sa.threshold.to_bits(), sb.threshold.to_bits());
                assert_eq!(sa.left.to_bits(), sb.left.to_bits());
                assert_eq!(sa.right.to_bits(), sb.right.to_bits());
            }
        }
        assert_eq!(history_a.loss, history_b.loss);
    }

    #[test]
    fn feature_permutation_with_pinned_streams_permutes_the_model() {
        // Reverse the columns but keep each feature's stream id and the
        // fold stream; every per-feature result must be identical.
        let data = gen_linear(150, 0.05, 21).unwrap();
        let m = 7;
        let reversed_features = {
            let f = data.features();
            Array2::from_shape_fn((data.n_rows(), m), |(i, k)| f[[i, m - 1 - k]])
        };
        let reversed = Dataset::new(
            reversed_features,
            data.targets().to_owned(),
            (0..m).rev().map(|k| format!("x{}", k + 1)).collect(),
        )
        .unwrap();

        let config = TrainConfig {
            iterations: 8,
            seed: 21,
            lasso: LassoMode::Fixed { lambda: 0.001 },
            ..TrainConfig::default()
        };
        let mut reversed_config = config.clone();
        reversed_config.feature_stream_ids = Some((0..m as u64).rev().collect());

        let (model_a, _) = train(&data, &config).unwrap();
        let (model_b, _) = train(&reversed, &reversed_config).unwrap();

        // Summation order over features shifts the last bits of shared
        // residuals, so fitted values agree to tolerance while the
        // stream-driven thresholds must match exactly.
        assert_abs_diff_eq!(model_a.intercept, model_b.intercept, epsilon = 1e-9);
        for k in 0..m {
            let rk = m - 1 - k;
            assert_abs_diff_eq!(
                model_a.weights[k],
                model_b.weights[rk],
                epsilon = 1e-9
            );
            let sa = model_a.gbms[k].stumps();
            let sb = model_b.gbms[rk].stumps();
            assert_eq!(sa.len(), sb.len());
            for (a, b) in sa.iter().zip(sb) {
                assert_eq!(a.threshold.to_bits(), b.threshold.to_bits());
                assert_abs_diff_eq!(a.left, b.left, epsilon = 1e-9);
                assert_abs_diff_eq!(a.right, b.right, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn duplicate_stream_ids_are_rejected() {
        let data = gen_linear(50, 0.05, 2).unwrap();
        let mut config = small_config(1, 2);
        config.feature_stream_ids = Some(vec![1, 1, 2, 3, 4, 5, 6]);
        assert!(matches!(
            train(&data, &config).unwrap_err(),
            Error::InvalidParameter { .. }
        ));
    }

    #[test]
    fn classification_requires_binary_labels_with_both_classes() {
        let features = Array2::from_shape_fn((10, 1), |(i, _)| i as f64);
        let mut config = small_config(2, 0);
        config.task = Task::Classification;

        let bad = Dataset::new(
            features.clone(),
            Array1::from_iter((0..10).map(|i| i as f64 / 10.0)),
            vec!["x1".into()],
        )
        .unwrap();
        assert!(matches!(
            train(&bad, &config).unwrap_err(),
            Error::NonBinaryLabel(_)
        ));

        let one_class = Dataset::new(features, Array1::ones(10), vec!["x1".into()]).unwrap();
        assert!(matches!(
            train(&one_class, &config).unwrap_err(),
            Error::DegenerateTargets
        ));
    }

    #[test]
    fn classification_separates_a_simple_threshold_problem() {
        let n = 200;
        let features = Array2::from_shape_fn((n, 2), |(i, k)| {
            if k == 0 {
                i as f64 / (n - 1) as f64
            } else {
                ((i * 7919) % n) as f64 / n as f64 // noise column
            }
        });
        let labels = Array1::from_shape_fn(n, |i| if i as f64 / (n - 1) as f64 > 0.5 { 1.0 } else { 0.0 });
        let data = Dataset::new(features, labels, vec!["x1".into(), "x2".into()]).unwrap();
        let config = TrainConfig {
            iterations: 30,
            task: Task::Classification,
            seed: 4,
            lasso: LassoMode::Fixed { lambda: 0.0 },
            ..TrainConfig::default()
        };
        let (model, history) = train(&data, &config).unwrap();
        let probs = model.predict(data.features()).unwrap();
        let correct = probs
            .iter()
            .zip(data.targets().iter())
            .filter(|(p, &y)| (**p > 0.5) == (y == 1.0))
            .count();
        assert!(correct >= 190, "accuracy {correct}/200");
        let first = history.loss[0];
        let last = *history.loss.last().unwrap();
        assert!(last < first, "cross-entropy did not improve: {first} -> {last}");
    }

    #[test]
    fn constant_targets_are_rejected_for_regression() {
        let data = Dataset::new(
            Array2::from_shape_fn((5, 1), |(i, _)| i as f64),
            Array1::from_elem(5, 3.0),
            vec!["x1".into()],
        )
        .unwrap();
        assert!(matches!(
            train(&data, &small_config(1, 0)).unwrap_err(),
            Error::DegenerateTargets
        ));
    }

    #[test]
    fn zero_residual_init_spends_the_first_iteration_idle() {
        let data = gen_linear(100, 0.05, 6).unwrap();
        let mut config = small_config(2, 6);
        config.zero_residual_init = true;
        let (_, history) = train(&data, &config).unwrap();
        // First iteration fits stumps to all-zero targets: flat boosters,
        // null weight fit.
        for k in 0..7 {
            assert_eq!(history.fitted_weights[[0, k]], 0.0);
        }
        // Second iteration sees real residuals and starts moving.
        assert!(history.fitted_weights.row(1).iter().any(|&v| v != 0.0));
    }
}
