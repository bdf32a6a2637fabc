//! Depth-1 regression stumps with randomized split thresholds.
//!
//! A stump splits one feature at a threshold and predicts a constant on each
//! side. The threshold is not optimized: it is drawn uniformly from the
//! feature's observed range, which costs one random draw instead of a scan
//! over candidate splits and acts as a regularizer inside a boosting loop.
//! Only the two leaf values are fitted, each to the mean of its side.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// A single split: `x <= threshold` predicts `left`, otherwise `right`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Stump {
    pub threshold: f64,
    pub left: f64,
    pub right: f64,
}

impl Stump {
    pub fn predict(&self, x: f64) -> f64 {
        if x <= self.threshold {
            self.left
        } else {
            self.right
        }
    }
}

/// Fit leaf values for a given threshold.
///
/// Each leaf is the mean of the targets on its side; a side that captures no
/// points falls back to the overall target mean, so the stump is total even
/// for degenerate thresholds.
pub fn fit_stump_at(threshold: f64, xs: &[f64], targets: &[f64]) -> Result<Stump> {
    if xs.len() != targets.len() {
        return Err(Error::LengthMismatch {
            what: "stump inputs",
            left: xs.len(),
            right: targets.len(),
        });
    }
    if xs.is_empty() {
        return Err(Error::Empty { what: "stump inputs" });
    }

    let mut left_sum = 0.0;
    let mut left_count = 0usize;
    let mut total_sum = 0.0;
    for (&x, &t) in xs.iter().zip(targets) {
        total_sum += t;
        if x <= threshold {
            left_sum += t;
            left_count += 1;
        }
    }
    let total_mean = total_sum / xs.len() as f64;
    let right_count = xs.len() - left_count;
    let left = if left_count > 0 {
        left_sum / left_count as f64
    } else {
        total_mean
    };
    let right = if right_count > 0 {
        (total_sum - left_sum) / right_count as f64
    } else {
        total_mean
    };
    Ok(Stump {
        threshold,
        left,
        right,
    })
}

/// Fit a stump with a threshold drawn uniformly from `[min(xs), max(xs)]`.
///
/// Exactly one draw is consumed per call, also when the range is a single
/// point (the threshold is then that point).
pub fn fit_stump(xs: &[f64], targets: &[f64], rng: &mut RngStream) -> Result<Stump> {
    if xs.is_empty() {
        return Err(Error::Empty { what: "stump inputs" });
    }
    let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let threshold = rng.random_range(min..=max);
    fit_stump_at(threshold, xs, targets)
}
