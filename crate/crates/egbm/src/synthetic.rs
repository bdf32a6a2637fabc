//! Synthetic benchmark datasets.
//!
//! Feature values are uniform on `[0, 1)`; regression targets add Gaussian
//! noise with a caller-chosen spread. Feature draws and noise draws come
//! from separate streams of the seed, so the same seed with different noise
//! levels sees the same feature matrix.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::rng::{RngStream, StreamId};

fn validate(n: usize, noise_std: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::TooFewRows { need: 2, got: n });
    }
    if !(noise_std >= 0.0) || !noise_std.is_finite() {
        return Err(Error::invalid(
            "noise std",
            format!("must be finite and >= 0, got {noise_std}"),
        ));
    }
    Ok(())
}

fn uniform_features(n: usize, m: usize, seed: u64) -> Array2<f64> {
    let mut rng = RngStream::new(seed, StreamId::synth_features());
    Array2::from_shape_fn((n, m), |_| rng.random::<f64>())
}

fn apply_noise(targets: &mut Array1<f64>, noise_std: f64, seed: u64) {
    if noise_std == 0.0 {
        return;
    }
    let mut rng = RngStream::new(seed, StreamId::synth_noise());
    let noise = Normal::new(0.0, noise_std).unwrap();
    targets.mapv_inplace(|t| t + noise.sample(&mut rng));
}

fn names(m: usize) -> Vec<String> {
    (1..=m).map(|k| format!("x{k}")).collect()
}

/// Seven uniform features; the target is linear in the first four:
/// `10 x1 - 20 x2 - 2 x3 + 3 x4 + noise`. Features 5 to 7 are pure
/// distractors.
pub fn gen_linear(n: usize, noise_std: f64, seed: u64) -> Result<Dataset> {
    validate(n, noise_std)?;
    let features = uniform_features(n, 7, seed);
    let mut targets: Array1<f64> = features
        .rows()
        .into_iter()
        .map(|r| 10.0 * r[0] - 20.0 * r[1] - 2.0 * r[2] + 3.0 * r[3])
        .collect();
    apply_noise(&mut targets, noise_std, seed);
    Dataset::new(features, targets, names(7))
}

/// The linear benchmark with the last distractor replaced by a strong
/// even term: `10 x1 - 20 x2 - 2 x3 + 3 x4 + 100 (x7 - 0.5)^2 + noise`.
pub fn gen_nonlinear(n: usize, noise_std: f64, seed: u64) -> Result<Dataset> {
    validate(n, noise_std)?;
    let features = uniform_features(n, 7, seed);
    let mut targets: Array1<f64> = features
        .rows()
        .into_iter()
        .map(|r| {
            10.0 * r[0] - 20.0 * r[1] - 2.0 * r[2] + 3.0 * r[3] + 100.0 * (r[6] - 0.5).powi(2)
        })
        .collect();
    apply_noise(&mut targets, noise_std, seed);
    Dataset::new(features, targets, names(7))
}

/// Five uniform features with interacting terms:
/// `x1^2 + x1 x2 - x3 x4 + x4 + noise`.
pub fn gen_polynomial(n: usize, noise_std: f64, seed: u64) -> Result<Dataset> {
    validate(n, noise_std)?;
    let features = uniform_features(n, 5, seed);
    let mut targets: Array1<f64> = features
        .rows()
        .into_iter()
        .map(|r| r[0] * r[0] + r[0] * r[1] - r[2] * r[3] + r[3])
        .collect();
    apply_noise(&mut targets, noise_std, seed);
    Dataset::new(features, targets, names(5))
}

/// Label convention for the checkerboard dataset.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChessboardLabels {
    /// `+1` on even cells, `-1` on odd cells.
    PlusMinus,
    /// `1` on even cells, `0` on odd cells.
    ZeroOne,
}

/// Whether `(x1, x2)` falls on an even cell of a `cells x cells`
/// checkerboard over the unit square. Coordinates at the upper edge belong
/// to the last cell.
pub fn chessboard_even(x1: f64, x2: f64, cells: usize) -> bool {
    let cell = |x: f64| ((x * cells as f64).floor() as usize).min(cells - 1);
    (cell(x1) + cell(x2)) % 2 == 0
}

/// Two uniform features labeled by checkerboard cell parity. No noise: the
/// difficulty comes entirely from the non-additive structure.
pub fn gen_chessboard(
    n: usize,
    cells: usize,
    labels: ChessboardLabels,
    seed: u64,
) -> Result<Dataset> {
    validate(n, 0.0)?;
    if cells < 2 {
        return Err(Error::invalid("cells", "must be at least 2"));
    }
    let features = uniform_features(n, 2, seed);
    let targets: Array1<f64> = features
        .rows()
        .into_iter()
        .map(|r| match (chessboard_even(r[0], r[1], cells), labels) {
            (true, ChessboardLabels::PlusMinus) => 1.0,
            (false, ChessboardLabels::PlusMinus) => -1.0,
            (true, ChessboardLabels::ZeroOne) => 1.0,
            (false, ChessboardLabels::ZeroOne) => 0.0,
        })
        .collect();
    Dataset::new(features, targets, names(2))
}
