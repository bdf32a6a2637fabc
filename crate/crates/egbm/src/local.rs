//! Local surrogate explanations for black-box models.
//!
//! Sample a neighborhood around a point of interest, ask the black box for
//! its predictions on those rows in a single batch, then fit an additive
//! model to the answers. The surrogate's shape curves and importances
//! describe the black box's behavior near the point; its R-squared against
//! the black box outputs says how far to trust them.

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{column_stats, ColumnStats, Dataset};
use crate::error::{BlackBoxError, Error, Result};
use crate::explain::{feature_importances, export_shape, ImportanceReport, ShapeTable};
use crate::rng::{RngStream, StreamId};
use crate::train::{train, AdditiveModel, TrainConfig, TrainingHistory};

/// Per-feature spread of a Gaussian neighborhood.
#[derive(Clone, Debug, PartialEq)]
pub enum SigmaSpec {
    Scalar(f64),
    PerFeature(Vec<f64>),
}

impl SigmaSpec {
    fn resolve(&self, m: usize) -> Result<Vec<f64>> {
        let sigmas = match self {
            SigmaSpec::Scalar(s) => vec![*s; m],
            SigmaSpec::PerFeature(v) => {
                if v.len() != m {
                    return Err(Error::LengthMismatch {
                        what: "sigma vector vs features",
                        left: v.len(),
                        right: m,
                    });
                }
                v.clone()
            }
        };
        if let Some(bad) = sigmas.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::invalid(
                "sigma",
                format!("must be finite and > 0, got {bad}"),
            ));
        }
        Ok(sigmas)
    }
}

/// How to sample the neighborhood.
#[derive(Clone, Debug, PartialEq)]
pub enum PerturbationKind {
    /// Independent Gaussians centered on the point of interest.
    Gaussian { sigma: SigmaSpec },
    /// Independent uniforms over an axis-aligned box.
    UniformBox { lower: Vec<f64>, upper: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    /// Total rows including the point of interest itself; at least 2.
    pub count: usize,
    pub seed: u64,
}

/// Gaussian neighborhood: `count - 1` perturbed rows followed by the point
/// itself as the last row. Draws go row by row, feature by feature.
pub fn perturb_gaussian(
    point: &[f64],
    sigma: &SigmaSpec,
    count: usize,
    seed: u64,
) -> Result<Array2<f64>> {
    let m = point.len();
    if m == 0 {
        return Err(Error::Empty { what: "point" });
    }
    if count < 2 {
        return Err(Error::invalid(
            "perturbation count",
            format!("must be at least 2, got {count}"),
        ));
    }
    let sigmas = sigma.resolve(m)?;
    let mut rng = RngStream::new(seed, StreamId::perturbation());
    let mut rows = Array2::zeros((count, m));
    for i in 0..count - 1 {
        for j in 0..m {
            let z: f64 = StandardNormal.sample(&mut rng);
            rows[[i, j]] = point[j] + sigmas[j] * z;
        }
    }
    for j in 0..m {
        rows[[count - 1, j]] = point[j];
    }
    Ok(rows)
}

/// Uniform neighborhood over a box: `count - 1` sampled rows followed by the
/// point itself. Bounds are swapped per coordinate when given in reverse
/// order; a zero-width coordinate stays constant. The point need not lie
/// inside the box.
pub fn perturb_uniform_box(
    lower: &[f64],
    upper: &[f64],
    count: usize,
    point: &[f64],
    seed: u64,
) -> Result<Array2<f64>> {
    let m = point.len();
    if m == 0 {
        return Err(Error::Empty { what: "point" });
    }
    if lower.len() != m || upper.len() != m {
        return Err(Error::LengthMismatch {
            what: "box bounds vs point",
            left: lower.len().max(upper.len()),
            right: m,
        });
    }
    if count < 2 {
        return Err(Error::invalid(
            "perturbation count",
            format!("must be at least 2, got {count}"),
        ));
    }
    let bounds: Vec<(f64, f64)> = lower
        .iter()
        .zip(upper)
        .map(|(&a, &b)| if a <= b { (a, b) } else { (b, a) })
        .collect();
    if let Some(bad) = bounds
        .iter()
        .flat_map(|(a, b)| [a, b])
        .find(|v| !v.is_finite())
    {
        return Err(Error::invalid(
            "box bounds",
            format!("must be finite, got {bad}"),
        ));
    }
    let mut rng = RngStream::new(seed, StreamId::perturbation());
    let mut rows = Array2::zeros((count, m));
    for i in 0..count - 1 {
        for (j, &(lo, hi)) in bounds.iter().enumerate() {
            rows[[i, j]] = rng.random_range(lo..=hi);
        }
    }
    for j in 0..m {
        rows[[count - 1, j]] = point[j];
    }
    Ok(rows)
}

/// Midpoint of two distinct dataset rows drawn without replacement: a point
/// of interest that lies between observed data rather than on it. Returns
/// the point and the two row indices.
pub fn midpoint_poi(dataset: &Dataset, seed: u64) -> Result<(Vec<f64>, usize, usize)> {
    let n = dataset.n_rows();
    let mut rng = RngStream::new(seed, StreamId::point_pick());
    let first = rng.random_range(0..n);
    let mut second = rng.random_range(0..n - 1);
    if second >= first {
        second += 1;
    }
    let features = dataset.features();
    let a = features.row(first);
    let b = features.row(second);
    let point = a.iter().zip(b.iter()).map(|(x, y)| 0.5 * (x + y)).collect();
    Ok((point, first, second))
}

/// Anything that can label a batch of rows.
pub trait BlackBox {
    fn query(&mut self, rows: ArrayView2<'_, f64>) -> std::result::Result<Vec<f64>, BlackBoxError>;
}

/// Adapter for closures.
pub struct FnBlackBox<F>(pub F);

impl<F> BlackBox for FnBlackBox<F>
where
    F: FnMut(ArrayView2<'_, f64>) -> Vec<f64>,
{
    fn query(&mut self, rows: ArrayView2<'_, f64>) -> std::result::Result<Vec<f64>, BlackBoxError> {
        Ok((self.0)(rows))
    }
}

/// A smooth two-feature probability field with checkerboard structure:
/// `p(x1, x2) = 0.5 * (1 - sin(pi * cells * x1) * sin(pi * cells * x2))`.
///
/// It behaves like a well-trained classifier on a `cells x cells`
/// checkerboard: near 0 or 1 deep inside cells, 0.5 on cell boundaries,
/// smooth in between. Useful as a reproducible stand-in for an external
/// model when exercising the local explainer.
#[derive(Clone, Copy, Debug)]
pub struct CheckerboardField {
    pub cells: usize,
}

impl BlackBox for CheckerboardField {
    fn query(&mut self, rows: ArrayView2<'_, f64>) -> std::result::Result<Vec<f64>, BlackBoxError> {
        if rows.ncols() != 2 {
            return Err(BlackBoxError::Other(format!(
                "checkerboard field expects 2 features, got {}",
                rows.ncols()
            )));
        }
        let c = self.cells as f64;
        Ok(rows
            .rows()
            .into_iter()
            .map(|r| {
                0.5 * (1.0
                    - (std::f64::consts::PI * c * r[0]).sin()
                        * (std::f64::consts::PI * c * r[1]).sin())
            })
            .collect())
    }
}

/// Options for [`explain_local`].
#[derive(Clone, Debug)]
pub struct LocalOptions {
    pub perturbation: PerturbationSpec,
    pub train: TrainConfig,
    /// Standardize neighborhood columns before fitting the surrogate
    /// (recommended: perturbation scales are often very different from the
    /// unit scale stump thresholds see). Shape grids are reported in
    /// original units either way.
    pub standardize_features: bool,
    /// Grid resolution of the reported shape curves.
    pub shape_grid: usize,
}

impl LocalOptions {
    pub fn new(perturbation: PerturbationSpec, train: TrainConfig) -> Self {
        LocalOptions {
            perturbation,
            train,
            standardize_features: true,
            shape_grid: 50,
        }
    }
}

/// A fitted local surrogate and everything derived from it.
#[derive(Clone, Debug)]
pub struct LocalExplanation {
    pub point: Vec<f64>,
    pub feature_names: Vec<String>,
    /// Surrogate model. When `feature_stats` is present the surrogate's
    /// inputs are standardized columns: apply the stats before predicting.
    pub surrogate: AdditiveModel,
    pub history: TrainingHistory,
    pub importance: ImportanceReport,
    /// R-squared of the surrogate against the black box outputs over the
    /// neighborhood.
    pub fidelity: f64,
    /// Contribution curves with grids in original feature units.
    pub shapes: Vec<ShapeTable>,
    /// The queried neighborhood in original units, labels included; the
    /// last row is the point of interest.
    pub neighborhood: Dataset,
    /// Standardization applied to the surrogate's inputs, when enabled.
    pub feature_stats: Option<ColumnStats>,
}

/// Fit an additive surrogate to a black box around one point.
///
/// The black box is queried exactly once, with the whole neighborhood as a
/// single batch (the point of interest is its last row). A black box that is
/// constant over the neighborhood has nothing to explain and surfaces as a
/// degenerate-target error.
pub fn explain_local(
    point: &[f64],
    feature_names: &[String],
    black_box: &mut dyn BlackBox,
    options: &LocalOptions,
) -> Result<LocalExplanation> {
    let m = point.len();
    if m == 0 {
        return Err(Error::Empty { what: "point" });
    }
    if feature_names.len() != m {
        return Err(Error::LengthMismatch {
            what: "point vs feature names",
            left: m,
            right: feature_names.len(),
        });
    }

    let spec = &options.perturbation;
    let rows = match &spec.kind {
        PerturbationKind::Gaussian { sigma } => {
            perturb_gaussian(point, sigma, spec.count, spec.seed)?
        }
        PerturbationKind::UniformBox { lower, upper } => {
            perturb_uniform_box(lower, upper, spec.count, point, spec.seed)?
        }
    };

    let outputs = black_box.query(rows.view())?;
    if outputs.len() != rows.nrows() {
        return Err(BlackBoxError::LengthMismatch {
            expected: rows.nrows(),
            got: outputs.len(),
        }
        .into());
    }
    if let Some(row) = outputs.iter().position(|v| !v.is_finite()) {
        return Err(BlackBoxError::NonFinite { row }.into());
    }

    let raw = Dataset::new(
        rows,
        ndarray::Array1::from_vec(outputs.clone()),
        feature_names.to_vec(),
    )?;
    let (fit_data, feature_stats) = if options.standardize_features {
        let stats = column_stats(raw.features());
        (raw.standardize_features(&stats)?, Some(stats))
    } else {
        (raw.clone(), None)
    };

    let (surrogate, history) = train(&fit_data, &options.train)?;
    let importance = feature_importances(&surrogate, &fit_data)?;

    let predictions = surrogate.predict(fit_data.features())?;
    let mean_out = outputs.iter().sum::<f64>() / outputs.len() as f64;
    let sse: f64 = outputs
        .iter()
        .zip(predictions.iter())
        .map(|(y, p)| (y - p).powi(2))
        .sum();
    let sst: f64 = outputs.iter().map(|y| (y - mean_out).powi(2)).sum();
    let fidelity = 1.0 - sse / sst;

    let mut shapes = Vec::with_capacity(m);
    for k in 0..m {
        let mut table = export_shape(&surrogate, &fit_data, k, options.shape_grid, false)?;
        if let Some(stats) = &feature_stats {
            let scale = if stats.std[k] > 0.0 { stats.std[k] } else { 1.0 };
            for g in &mut table.grid {
                *g = *g * scale + stats.mean[k];
            }
        }
        shapes.push(table);
    }

    Ok(LocalExplanation {
        point: point.to_vec(),
        feature_names: feature_names.to_vec(),
        surrogate,
        history,
        importance,
        fidelity,
        shapes,
        neighborhood: raw,
        feature_stats,
    })
}

/// A black box that pipes rows to an external command.
///
/// The command runs through the shell once per query. It receives CSV on
/// stdin (header row, then one line per input row) and must print exactly
/// one decimal number per input row to stdout, in order, then exit with
/// status zero.
#[derive(Clone, Debug)]
pub struct SubprocessBlackBox {
    pub command: String,
    pub feature_names: Vec<String>,
}

impl BlackBox for SubprocessBlackBox {
    fn query(&mut self, rows: ArrayView2<'_, f64>) -> std::result::Result<Vec<f64>, BlackBoxError> {
        use std::io::Write;
        use std::process::{Command, Stdio};

        let mut payload = String::with_capacity(rows.nrows() * rows.ncols() * 12);
        payload.push_str(&self.feature_names.join(","));
        payload.push('\n');
        for row in rows.rows() {
            let mut first = true;
            for value in row.iter() {
                if !first {
                    payload.push(',');
                }
                payload.push_str(&crate::data::format_float(*value));
                first = false;
            }
            payload.push('\n');
        }

        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&self.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped())
            .spawn()
            .map_err(|source| BlackBoxError::Spawn {
                command: self.command.clone(),
                source,
            })?;

        let mut stdin = child.stdin.take().expect("stdin was piped");
        let writer = std::thread::spawn(move || {
            // The child may exit without reading everything; that shows up
            // as a broken pipe here and as a status/line-count problem below.
            let _ = stdin.write_all(payload.as_bytes());
        });

        let output = child.wait_with_output().map_err(|source| BlackBoxError::Spawn {
            command: self.command.clone(),
            source,
        })?;
        let _ = writer.join();

        if !output.status.success() {
            return Err(BlackBoxError::CommandFailed {
                command: self.command.clone(),
                status: output.status.to_string(),
                stderr: String::from_utf8_lossy(&output.stderr).trim().to_string(),
            });
        }

        let stdout = String::from_utf8_lossy(&output.stdout);
        let mut values = Vec::with_capacity(rows.nrows());
        for (idx, line) in stdout.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let value = trimmed
                .parse::<f64>()
                .map_err(|_| BlackBoxError::BadOutputLine {
                    line: idx + 1,
                    value: trimmed.to_string(),
                })?;
            values.push(value);
        }
        if values.len() != rows.nrows() {
            return Err(BlackBoxError::LengthMismatch {
                expected: rows.nrows(),
                got: values.len(),
            });
        }
        Ok(values)
    }
}
