//! Plot-ready CSV renderings of report pieces.

use egbm::data::format_float;
use egbm::explain::{ImportanceReport, ShapeTable};
use ndarray::Array2;

pub fn rows_of(matrix: &Array2<f64>) -> Vec<Vec<f64>> {
    matrix.rows().into_iter().map(|row| row.to_vec()).collect()
}

pub fn loss_csv(loss: &[f64]) -> Vec<u8> {
    let mut out = String::from("iteration,loss\n");
    for (i, value) in loss.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, format_float(*value)));
    }
    out.into_bytes()
}

pub fn weights_csv(names: &[String], weights: &Array2<f64>) -> Vec<u8> {
    let mut out = String::from("iteration");
    for name in names {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (i, row) in weights.rows().into_iter().enumerate() {
        out.push_str(&(i + 1).to_string());
        for value in row.iter() {
            out.push(',');
            out.push_str(&format_float(*value));
        }
        out.push('\n');
    }
    out.into_bytes()
}

pub fn importance_csv(names: &[String], report: &ImportanceReport) -> Vec<u8> {
    let mut rank = vec![0usize; report.ranking.len()];
    for (position, &feature) in report.ranking.iter().enumerate() {
        rank[feature] = position + 1;
    }
    let mut out = String::from("feature,importance,weight,rank\n");
    for (k, name) in names.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            name,
            format_float(report.importance[k]),
            format_float(report.weights[k]),
            rank[k]
        ));
    }
    out.into_bytes()
}

pub fn shape_csv(table: &ShapeTable) -> Vec<u8> {
    let mut out = String::from("value,contribution\n");
    for (x, c) in table.grid.iter().zip(&table.contribution) {
        out.push_str(&format!("{},{}\n", format_float(*x), format_float(*c)));
    }
    out.into_bytes()
}

/// Feature names become file names; anything outside a safe set turns
/// into an underscore.
pub fn safe_file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') {
                c
            } else {
                '_'
            }
        })
        .collect()
}
