//! The `train` subcommand: fit a model on a CSV dataset and write the model
//! plus a training report.

use std::path::Path;

use serde_json::{json, Value};

use egbm::data::{column_stats, load_csv, Dataset};
use egbm::explain::{
    convergence_check, default_window, feature_importances, DEFAULT_DRIFT_THRESHOLD,
};
use egbm::train::{model_to_json, train, AdditiveModel, Task};

use crate::manifest::{manifest_path, RunOutputs};
use crate::reports::{importance_csv, loss_csv, rows_of, weights_csv};
use crate::{usage, CliError, TrainArgs};

pub fn run(args: &TrainArgs, threads: Option<usize>) -> Result<(), CliError> {
    let config = args.train.to_config();
    config
        .validate()
        .map_err(|err| usage(err.to_string()))?;
    let seed = config.seed;

    let raw = load_csv(&args.data, &args.target)?;
    let dataset = if args.standardize_features {
        let stats = column_stats(raw.features());
        raw.standardize_features(&stats)?
    } else {
        raw
    };

    let (model, history) = train(&dataset, &config)?;
    let importance = feature_importances(&model, &dataset)?;
    let window = default_window(config.iterations);
    let convergence = convergence_check(&history, window, DEFAULT_DRIFT_THRESHOLD)?;
    let fit = fit_metrics(&model, &dataset)?;

    let csv_matrices = args.format.wants_csv().then(|| {
        (
            loss_csv(&history.loss),
            weights_csv(dataset.feature_names(), &history.weights),
            importance_csv(dataset.feature_names(), &importance),
        )
    });

    let weight_rows = rows_of(&history.weights);
    let fitted_rows = rows_of(&history.fitted_weights);
    let report = json!({
        "command": "train",
        "data": {
            "path": args.data.display().to_string(),
            "rows": dataset.n_rows(),
            "feature_names": dataset.feature_names(),
            "target": args.target,
            "standardized_features": args.standardize_features,
        },
        "config": config.clone(),
        "weights": model.weights.to_vec(),
        "intercept": model.intercept,
        "importance": importance,
        "fit": fit,
        "convergence": convergence,
        "weight_trajectory": weight_rows,
        "fitted_weight_trajectory": fitted_rows,
        "loss": history.loss,
    });

    let model_json = model_to_json(&model)?;

    let manifest_config = json!({
        "data": args.data.display().to_string(),
        "target": args.target,
        "standardize_features": args.standardize_features,
        "train": config,
        "model_out": args.model_out.display().to_string(),
        "report_out": args.report_out.display().to_string(),
        "format": args.format.as_str(),
        "threads": threads,
    });

    let mut outputs = RunOutputs::new("train", Some(seed), manifest_config);
    outputs.record_input(&args.data)?;
    outputs.add_file(args.model_out.clone(), model_json.into_bytes());
    outputs.add_json(args.report_out.clone(), &report);
    if let Some((loss, weights, importance)) = csv_matrices {
        outputs.add_file(sibling(&args.report_out, "loss.csv"), loss);
        outputs.add_file(sibling(&args.report_out, "weights.csv"), weights);
        outputs.add_file(sibling(&args.report_out, "importance.csv"), importance);
    }
    outputs.write_all(&manifest_path(&args.model_out))
}

/// `r.json` → `r.loss.csv` and friends.
pub fn sibling(report: &Path, suffix: &str) -> std::path::PathBuf {
    report.with_extension(suffix)
}

fn fit_metrics(model: &AdditiveModel, dataset: &Dataset) -> Result<Value, CliError> {
    let predictions = model.predict(dataset.features())?;
    let targets = dataset.targets();
    Ok(match model.task {
        Task::Regression => {
            let mean = targets.sum() / targets.len() as f64;
            let sse: f64 = predictions
                .iter()
                .zip(targets.iter())
                .map(|(p, y)| (y - p) * (y - p))
                .sum();
            let sst: f64 = targets.iter().map(|y| (y - mean) * (y - mean)).sum();
            let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 0.0 };
            json!({ "train_r2": r2 })
        }
        Task::Classification => {
            let correct = predictions
                .iter()
                .zip(targets.iter())
                .filter(|(p, y)| (**p >= 0.5) == (**y == 1.0))
                .count();
            json!({ "train_accuracy": correct as f64 / targets.len() as f64 })
        }
    })
}
