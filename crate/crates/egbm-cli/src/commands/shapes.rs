//! The `shapes` subcommand: export per-feature contribution curves from a
//! saved model as plot-ready CSV files.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use serde_json::json;

use egbm::data::load_csv;
use egbm::explain::export_shape;
use egbm::train::load_model;

use crate::manifest::RunOutputs;
use crate::reports::{safe_file_stem, shape_csv};
use crate::{usage, CliError, ShapesArgs};

pub fn run(args: &ShapesArgs, threads: Option<usize>) -> Result<(), CliError> {
    if args.grid < 2 {
        return Err(usage(format!(
            "--grid must be at least 2, got {}",
            args.grid
        )));
    }

    let model = load_model(&args.model)?;
    let dataset = load_csv(&args.data, &args.target)?;

    let indices: Vec<usize> = match &args.features {
        Some(list) => list
            .0
            .iter()
            .map(|name| {
                dataset.feature_index(name).ok_or_else(|| {
                    CliError::Runtime(format!(
                        "unknown feature {name:?}; the dataset has {:?}",
                        dataset.feature_names()
                    ))
                })
            })
            .collect::<Result<_, _>>()?,
        None => (0..dataset.n_features()).collect(),
    };

    let mut tables = Vec::with_capacity(indices.len());
    for &k in &indices {
        tables.push(export_shape(&model, &dataset, k, args.grid, args.scaled)?);
    }

    let mut paths: Vec<PathBuf> = Vec::with_capacity(tables.len());
    let mut seen = BTreeSet::new();
    for table in &tables {
        let path = args
            .out_dir
            .join(format!("shape_{}.csv", safe_file_stem(&table.feature_name)));
        if !seen.insert(path.clone()) {
            return Err(CliError::Runtime(format!(
                "feature names collide after sanitizing: {} would be written twice",
                path.display()
            )));
        }
        paths.push(path);
    }

    for table in &tables {
        if table.constant {
            eprintln!(
                "warning: feature {:?} has a constant shape; its contribution column is all zeros",
                table.feature_name
            );
        }
    }

    fs::create_dir_all(&args.out_dir)
        .map_err(|err| CliError::Runtime(format!("{}: {err}", args.out_dir.display())))?;

    let selected: Vec<&str> = tables.iter().map(|t| t.feature_name.as_str()).collect();
    let config = json!({
        "model": args.model.display().to_string(),
        "data": args.data.display().to_string(),
        "target": args.target,
        "features": selected,
        "grid": args.grid,
        "scaled": args.scaled,
        "out_dir": args.out_dir.display().to_string(),
        "threads": threads,
    });

    let mut outputs = RunOutputs::new("shapes", None, config);
    outputs.record_input(&args.model)?;
    outputs.record_input(&args.data)?;
    for (path, table) in paths.into_iter().zip(&tables) {
        outputs.add_file(path, shape_csv(table));
    }
    outputs.write_all(&args.out_dir.join("shapes.manifest.json"))
}
