//! Tabular datasets: CSV loading, validation, and standardization.
//!
//! All columns are `f64`. Non-finite cells are rejected at load time so the
//! numeric code never has to re-check, and targets can be standardized to
//! zero mean and unit variance with the statistics kept for the way back.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A feature matrix with aligned targets and column names.
#[derive(Clone, Debug)]
pub struct Dataset {
    features: Array2<f64>,
    targets: Array1<f64>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Validates shapes, names, and finiteness.
    ///
    /// Requires at least two rows (nothing downstream is meaningful on fewer),
    /// one column per name, unique non-empty names, and finite values
    /// throughout.
    pub fn new(
        features: Array2<f64>,
        targets: Array1<f64>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let (n, m) = features.dim();
        if n < 2 {
            return Err(Error::TooFewRows { need: 2, got: n });
        }
        if m == 0 {
            return Err(Error::Empty {
                what: "feature matrix",
            });
        }
        if targets.len() != n {
            return Err(Error::LengthMismatch {
                what: "features vs targets",
                left: n,
                right: targets.len(),
            });
        }
        if feature_names.len() != m {
            return Err(Error::LengthMismatch {
                what: "feature columns vs names",
                left: m,
                right: feature_names.len(),
            });
        }
        for (idx, name) in feature_names.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::invalid(
                    "feature name",
                    format!("column {idx} has an empty name"),
                ));
            }
            if feature_names[..idx].contains(name) {
                return Err(Error::DuplicateColumn { name: name.clone() });
            }
        }
        if let Some(bad) = features.iter().chain(targets.iter()).find(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "dataset values",
                format!("found non-finite value {bad}"),
            ));
        }
        Ok(Dataset {
            features,
            targets,
            feature_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn targets(&self) -> ArrayView1<'_, f64> {
        self.targets.view()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn column(&self, k: usize) -> Result<ArrayView1<'_, f64>> {
        if k >= self.n_features() {
            return Err(Error::BadFeatureIndex {
                index: k,
                count: self.n_features(),
            });
        }
        Ok(self.features.column(k))
    }

    /// Index of a feature by name.
    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// A copy with every feature column centered and scaled by the given
    /// statistics. Columns whose recorded spread is zero are only centered.
    pub fn standardize_features(&self, stats: &ColumnStats) -> Result<Dataset> {
        if stats.mean.len() != self.n_features() {
            return Err(Error::LengthMismatch {
                what: "feature columns vs stats",
                left: self.n_features(),
                right: stats.mean.len(),
            });
        }
        let mut features = self.features.clone();
        for (k, mut col) in features.columns_mut().into_iter().enumerate() {
            let scale = if stats.std[k] > 0.0 { stats.std[k] } else { 1.0 };
            col.mapv_inplace(|v| (v - stats.mean[k]) / scale);
        }
        Ok(Dataset {
            features,
            targets: self.targets.clone(),
            feature_names: self.feature_names.clone(),
        })
    }
}

/// Mean and population standard deviation of a target vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub mean: f64,
    pub std: f64,
}

impl StandardizationStats {
    pub fn standardize(&self, value: f64) -> f64 {
        (value - self.mean) / self.std
    }

    pub fn destandardize(&self, value: f64) -> f64 {
        value * self.std + self.mean
    }
}

/// Center a target vector and scale it to unit population variance.
///
/// Fails on constant targets, where the scale is undefined.
pub fn standardize_targets(targets: ArrayView1<'_, f64>) -> Result<(Array1<f64>, StandardizationStats)> {
    if targets.is_empty() {
        return Err(Error::Empty { what: "targets" });
    }
    let mean = targets.mean().unwrap();
    let var = targets.mapv(|v| (v - mean).powi(2)).mean().unwrap();
    let std = var.sqrt();
    if !(std > 0.0) || !std.is_finite() {
        return Err(Error::DegenerateTargets);
    }
    let stats = StandardizationStats { mean, std };
    Ok((targets.mapv(|v| stats.standardize(v)), stats))
}

/// Per-column mean and population standard deviation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ColumnStats {
    pub mean: Array1<f64>,
    pub std: Array1<f64>,
}

pub fn column_stats(features: ArrayView2<'_, f64>) -> ColumnStats {
    let n = features.nrows().max(1) as f64;
    let mean: Array1<f64> = features
        .columns()
        .into_iter()
        .map(|c| c.sum() / n)
        .collect();
    let std: Array1<f64> = features
        .columns()
        .into_iter()
        .zip(mean.iter())
        .map(|(c, &mu)| (c.mapv(|v| (v - mu).powi(2)).sum() / n).sqrt())
        .collect();
    ColumnStats { mean, std }
}

/// Population standard deviation of a slice.
pub fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Load a headered CSV, splitting off `target_column` as the target vector.
///
/// Every cell must parse as a finite `f64`; the first offending cell is
/// reported with its 1-based data row and column name. At least two data rows
/// are required.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::Reader::from_reader(BufReader::new(file));

    let headers: Vec<String> = reader
        .headers()
        .map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?
        .iter()
        .map(str::to_owned)
        .collect();

    let mut target_pos = None;
    for (idx, name) in headers.iter().enumerate() {
        if name == target_column {
            if target_pos.is_some() {
                return Err(Error::DuplicateColumn { name: name.clone() });
            }
            target_pos = Some(idx);
        }
    }
    let target_pos = target_pos.ok_or_else(|| Error::MissingTargetColumn {
        name: target_column.to_string(),
    })?;

    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(idx, _)| *idx != target_pos)
        .map(|(_, name)| name.clone())
        .collect();

    let mut rows: Vec<f64> = Vec::new();
    let mut targets: Vec<f64> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|source| Error::Csv {
            path: path.to_path_buf(),
            source,
        })?;
        for (col_idx, cell) in record.iter().enumerate() {
            let parsed = cell.trim().parse::<f64>().ok().filter(|v| v.is_finite());
            let value = parsed.ok_or_else(|| Error::BadCell {
                row: row_idx + 1,
                column: headers
                    .get(col_idx)
                    .cloned()
                    .unwrap_or_else(|| format!("#{col_idx}")),
                value: cell.to_string(),
            })?;
            if col_idx == target_pos {
                targets.push(value);
            } else {
                rows.push(value);
            }
        }
    }

    let n = targets.len();
    if n < 2 {
        return Err(Error::TooFewRows { need: 2, got: n });
    }
    let m = feature_names.len();
    let features = Array2::from_shape_vec((n, m), rows).map_err(|_| Error::invalid(
        "csv shape",
        "rows have inconsistent column counts",
    ))?;
    Dataset::new(features, Array1::from_vec(targets), feature_names)
}

/// Write a dataset as headered CSV, target column last.
///
/// Values print in shortest round-trip form, so writing, loading, and writing
/// again is byte-identical.
pub fn write_csv(dataset: &Dataset, target_name: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = BufWriter::new(file);
    write_csv_to(dataset, target_name, &mut out).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Same as [`write_csv`], but into any writer.
pub fn write_csv_to(dataset: &Dataset, target_name: &str, out: &mut impl Write) -> std::io::Result<()> {
    let mut header = dataset.feature_names.join(",");
    header.push(',');
    header.push_str(target_name);
    writeln!(out, "{header}")?;
    let mut line = String::new();
    for (row, target) in dataset.features.rows().into_iter().zip(dataset.targets.iter()) {
        line.clear();
        for value in row.iter() {
            line.push_str(format_float(*value).as_str());
            line.push(',');
        }
        line.push_str(format_float(*target).as_str());
        writeln!(out, "{line}")?;
    }
    out.flush()
}

/// Shortest decimal form that round-trips, with a `.0` suffix on integral
/// values so the column stays visibly numeric.
pub fn format_float(value: f64) -> String {
    let mut s = format!("{value}");
    if !s.contains(['.', 'e', 'E']) {
        s.push_str(".0");
    }
    s
}
