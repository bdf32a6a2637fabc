//! The `explain-local` subcommand: sample a neighborhood around one point,
//! query a black box once, fit an additive surrogate, and report what it
//! found.

use serde_json::{json, Value};

use egbm::explain::{convergence_check, default_window, DEFAULT_DRIFT_THRESHOLD};
use egbm::local::{
    explain_local, CheckerboardField, LocalOptions, PerturbationKind, PerturbationSpec, SigmaSpec,
    SubprocessBlackBox,
};

use crate::commands::train::sibling;
use crate::manifest::{manifest_path, RunOutputs};
use crate::reports::{importance_csv, loss_csv, rows_of, safe_file_stem, shape_csv, weights_csv};
use crate::{usage, CliError, LocalArgs};

enum Source {
    Chessboard { cells: usize },
    Command(String),
}

pub fn run(args: &LocalArgs, threads: Option<usize>) -> Result<(), CliError> {
    let point = args.point.0.clone();
    if point.iter().any(|v| !v.is_finite()) {
        return Err(usage("--point values must be finite"));
    }
    let m = point.len();
    let feature_names: Vec<String> = match &args.feature_names {
        Some(list) => {
            if list.0.len() != m {
                return Err(usage(format!(
                    "--feature-names lists {} names for {m} point values",
                    list.0.len()
                )));
            }
            list.0.clone()
        }
        None => (1..=m).map(|i| format!("x{i}")).collect(),
    };

    let config = args.train.to_config();
    config.validate().map_err(|err| usage(err.to_string()))?;
    let seed = config.seed;
    if args.n < 2 {
        return Err(usage(
            "--n must be at least 2: the point itself plus neighbors",
        ));
    }
    if args.shape_grid < 2 {
        return Err(usage("--shape-grid must be at least 2"));
    }

    let kind = build_perturbation(args, m)?;
    let source = match (&args.blackbox, args.chessboard) {
        (Some(command), _) => Source::Command(command.clone()),
        (None, true) => {
            if m != 2 {
                return Err(usage("the built-in chessboard expects a 2-value --point"));
            }
            let cells = args.cells.unwrap_or(4);
            if cells == 0 {
                return Err(usage("--cells must be at least 1"));
            }
            Source::Chessboard { cells }
        }
        (None, false) => unreachable!("clap requires a black box source"),
    };

    let spec = PerturbationSpec {
        kind,
        count: args.n,
        seed,
    };
    let mut options = LocalOptions::new(spec, config.clone());
    options.standardize_features = args.standardize_features;
    options.shape_grid = args.shape_grid;

    let explanation = match &source {
        Source::Chessboard { cells } => explain_local(
            &point,
            &feature_names,
            &mut CheckerboardField { cells: *cells },
            &options,
        )?,
        Source::Command(command) => explain_local(
            &point,
            &feature_names,
            &mut SubprocessBlackBox {
                command: command.clone(),
                feature_names: feature_names.clone(),
            },
            &options,
        )?,
    };

    let window = default_window(config.iterations);
    let convergence = convergence_check(&explanation.history, window, DEFAULT_DRIFT_THRESHOLD)?;

    let csv_matrices = args.format.wants_csv().then(|| {
        let mut files = vec![
            (
                sibling(&args.report_out, "loss.csv"),
                loss_csv(&explanation.history.loss),
            ),
            (
                sibling(&args.report_out, "weights.csv"),
                weights_csv(&feature_names, &explanation.history.weights),
            ),
            (
                sibling(&args.report_out, "importance.csv"),
                importance_csv(&feature_names, &explanation.importance),
            ),
        ];
        for table in &explanation.shapes {
            files.push((
                sibling(
                    &args.report_out,
                    &format!("shape_{}.csv", safe_file_stem(&table.feature_name)),
                ),
                shape_csv(table),
            ));
        }
        files
    });

    let weight_rows = rows_of(&explanation.history.weights);
    let fitted_rows = rows_of(&explanation.history.fitted_weights);
    let report = json!({
        "command": "explain-local",
        "point": &point,
        "feature_names": &feature_names,
        "fidelity": explanation.fidelity,
        "intercept": explanation.surrogate.intercept,
        "weights": explanation.surrogate.weights.to_vec(),
        "importance": &explanation.importance,
        "shapes": &explanation.shapes,
        "convergence": convergence,
        "weight_trajectory": weight_rows,
        "fitted_weight_trajectory": fitted_rows,
        "loss": &explanation.history.loss,
        "neighborhood_rows": explanation.neighborhood.n_rows(),
        "standardized_features": explanation.feature_stats.is_some(),
    });

    let black_box_json = match &source {
        Source::Chessboard { cells } => json!({ "builtin": "chessboard", "cells": cells }),
        Source::Command(command) => json!({ "command": command }),
    };
    let manifest_config = json!({
        "point": &point,
        "feature_names": &feature_names,
        "black_box": black_box_json,
        "perturbation": perturbation_json(&options.perturbation.kind),
        "n": args.n,
        "standardize_features": args.standardize_features,
        "shape_grid": args.shape_grid,
        "train": config,
        "report_out": args.report_out.display().to_string(),
        "format": args.format.as_str(),
        "threads": threads,
    });

    let mut outputs = RunOutputs::new("explain-local", Some(seed), manifest_config);
    outputs.add_json(args.report_out.clone(), &report);
    if let Some(files) = csv_matrices {
        for (path, bytes) in files {
            outputs.add_file(path, bytes);
        }
    }
    outputs.write_all(&manifest_path(&args.report_out))
}

fn build_perturbation(args: &LocalArgs, m: usize) -> Result<PerturbationKind, CliError> {
    if let Some(lower) = &args.box_lower {
        let upper = args
            .box_upper
            .as_ref()
            .expect("clap ties the box flags together");
        if lower.0.len() != m || upper.0.len() != m {
            return Err(usage(format!(
                "box corners need {m} values: got {} lower and {} upper",
                lower.0.len(),
                upper.0.len()
            )));
        }
        if lower.0.iter().chain(&upper.0).any(|v| !v.is_finite()) {
            return Err(usage("box corner values must be finite"));
        }
        return Ok(PerturbationKind::UniformBox {
            lower: lower.0.clone(),
            upper: upper.0.clone(),
        });
    }
    if let Some(per) = &args.sigma_per_feature {
        if per.0.len() != m {
            return Err(usage(format!(
                "--sigma-per-feature lists {} values for {m} features",
                per.0.len()
            )));
        }
        if per.0.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(usage("--sigma-per-feature values must be finite and > 0"));
        }
        return Ok(PerturbationKind::Gaussian {
            sigma: SigmaSpec::PerFeature(per.0.clone()),
        });
    }
    let sigma = args.sigma.unwrap_or(0.1);
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(usage(format!("--sigma must be finite and > 0, got {sigma}")));
    }
    Ok(PerturbationKind::Gaussian {
        sigma: SigmaSpec::Scalar(sigma),
    })
}

fn perturbation_json(kind: &PerturbationKind) -> Value {
    match kind {
        PerturbationKind::Gaussian {
            sigma: SigmaSpec::Scalar(sigma),
        } => json!({ "kind": "gaussian", "sigma": sigma }),
        PerturbationKind::Gaussian {
            sigma: SigmaSpec::PerFeature(sigmas),
        } => json!({ "kind": "gaussian", "sigma_per_feature": sigmas }),
        PerturbationKind::UniformBox { lower, upper } => {
            json!({ "kind": "uniform-box", "lower": lower, "upper": upper })
        }
    }
}
