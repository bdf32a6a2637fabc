//! Gradient boosting over a single feature.
//!
//! A [`FeatureGbm`] is an ordered list of stumps on one feature, each scaled
//! by a shared learning rate. Its prediction is the sum of scaled stump
//! outputs, which makes it a one-dimensional step function: the shape
//! function for that feature in the assembled additive model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::stump::{fit_stump, Stump};
use crate::train::sigmoid;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeatureGbm {
    feature_index: usize,
    learning_rate: f64,
    stumps: Vec<Stump>,
}

impl FeatureGbm {
    /// An empty booster for `feature_index`. The learning rate must lie in
    /// `(0, 1]` and is fixed for the booster's lifetime.
    pub fn new(feature_index: usize, learning_rate: f64) -> Result<Self> {
        if !(learning_rate > 0.0 && learning_rate <= 1.0) {
            return Err(Error::invalid(
                "learning rate",
                format!("must be in (0, 1], got {learning_rate}"),
            ));
        }
        Ok(FeatureGbm {
            feature_index,
            learning_rate,
            stumps: Vec::new(),
        })
    }

    /// Rebuild a booster from stored stumps (model loading).
    pub fn from_stumps(feature_index: usize, learning_rate: f64, stumps: Vec<Stump>) -> Result<Self> {
        let mut gbm = FeatureGbm::new(feature_index, learning_rate)?;
        gbm.stumps = stumps;
        Ok(gbm)
    }

    pub fn feature_index(&self) -> usize {
        self.feature_index
    }

    pub fn learning_rate(&self) -> f64 {
        self.learning_rate
    }

    pub fn n_stumps(&self) -> usize {
        self.stumps.len()
    }

    pub fn stumps(&self) -> &[Stump] {
        &self.stumps
    }

    /// Fit one stump to `targets` and append it.
    ///
    /// Returns the appended stump so callers can update cached predictions
    /// incrementally: the prediction delta at `x` is exactly
    /// `learning_rate * stump.predict(x)`.
    pub fn append_step(&mut self, xs: &[f64], targets: &[f64], rng: &mut RngStream) -> Result<Stump> {
        let stump = fit_stump(xs, targets, rng)?;
        self.stumps.push(stump);
        Ok(stump)
    }

    /// Sum of scaled stump outputs at a single point. An empty booster
    /// predicts zero everywhere.
    pub fn predict_one(&self, x: f64) -> f64 {
        self.stumps
            .iter()
            .map(|s| self.learning_rate * s.predict(x))
            .sum()
    }

    pub fn predict(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter().map(|&x| self.predict_one(x)).collect()
    }

    /// Warm up the booster on binary labels before joint training.
    ///
    /// Runs `steps` rounds of logistic boosting against this booster's own
    /// predictions: each round fits a stump to `label - sigmoid(prediction)`.
    /// With a fresh booster the first round sees residuals of exactly ±0.5.
    pub fn pretrain_classification(
        &mut self,
        xs: &[f64],
        labels: &[f64],
        steps: usize,
        rng: &mut RngStream,
    ) -> Result<()> {
        if xs.len() != labels.len() {
            return Err(Error::LengthMismatch {
                what: "pretrain inputs",
                left: xs.len(),
                right: labels.len(),
            });
        }
        if let Some(&bad) = labels.iter().find(|&&l| l != 0.0 && l != 1.0) {
            return Err(Error::NonBinaryLabel(bad));
        }
        let mut predictions = self.predict(xs);
        let mut residuals = vec![0.0; xs.len()];
        for _ in 0..steps {
            for (r, (&label, &pred)) in residuals.iter_mut().zip(labels.iter().zip(&predictions)) {
                *r = label - sigmoid(pred);
            }
            let stump = self.append_step(xs, &residuals, rng)?;
            for (pred, &x) in predictions.iter_mut().zip(xs) {
                *pred += self.learning_rate * stump.predict(x);
            }
        }
        Ok(())
    }
}
