//! Additive models assembled from per-feature gradient boosting machines.
//!
//! The model is a generalized additive model
//!
//! ```text
//! y(x) = w0 + w1 * g1(x1) + ... + wm * gm(xm)
//! ```
//!
//! where each shape function `g_k` is a gradient boosting machine over a
//! single feature, built from depth-1 regression stumps with randomly drawn
//! split thresholds. Training alternates between appending one stump per
//! feature on the current residuals and re-fitting the outer weights `w` with
//! an L1-penalized least-squares solve, smoothed across iterations. The result
//! is fully inspectable: each feature's contribution is a one-dimensional
//! function that can be plotted, and `|w_k|` scaled by the spread of `g_k`
//! over the data gives a feature importance score.
//!
//! The same machinery doubles as a local explainer for black-box models:
//! sample a neighborhood around a point of interest, query the black box once
//! for labels, and fit an additive surrogate to the answers ([`local`]).
//!
//! # Quick start
//!
//! ```
//! use egbm::synthetic::gen_linear;
//! use egbm::train::{train, TrainConfig};
//! use egbm::explain::feature_importances;
//!
//! let data = gen_linear(500, 0.05, 7).unwrap();
//! let mut config = TrainConfig::default();
//! config.iterations = 40;
//! config.seed = 7;
//! let (model, _history) = train(&data, &config).unwrap();
//! let report = feature_importances(&model, &data).unwrap();
//! assert_eq!(report.importance.len(), 7);
//! ```

pub mod data;
pub mod error;
pub mod explain;
pub mod gbm;
pub mod lasso;
pub mod local;
pub mod rng;
pub mod stump;
pub mod synthetic;
pub mod train;

pub use error::{BlackBoxError, Error, Result};
