//! The `synth` subcommand: write a synthetic benchmark dataset as CSV.

use serde_json::json;

use egbm::data::write_csv_to;
use egbm::synthetic::{gen_chessboard, gen_linear, gen_nonlinear, gen_polynomial};

use crate::manifest::{manifest_path, RunOutputs};
use crate::{usage, CliError, LabelsArg, SynthArgs, SynthKind};

pub fn run(args: &SynthArgs, threads: Option<usize>) -> Result<(), CliError> {
    match args.kind {
        SynthKind::Chessboard => {
            if args.noise.is_some() {
                return Err(usage(
                    "--noise does not apply to --kind chessboard (its labels are deterministic)",
                ));
            }
        }
        _ => {
            if args.cells.is_some() {
                return Err(usage(format!(
                    "--cells only applies to --kind chessboard, not {}",
                    args.kind.as_str()
                )));
            }
            if args.labels.is_some() {
                return Err(usage(format!(
                    "--labels only applies to --kind chessboard, not {}",
                    args.kind.as_str()
                )));
            }
        }
    }

    let noise = args.noise.unwrap_or(0.05);
    let cells = args.cells.unwrap_or(4);
    let labels = args.labels.unwrap_or(LabelsArg::PlusMinus);

    // The generators validate their numeric arguments, and those all come
    // straight from flags here, so their rejections are usage errors.
    let dataset = match args.kind {
        SynthKind::Linear => gen_linear(args.n, noise, args.seed),
        SynthKind::Nonlinear => gen_nonlinear(args.n, noise, args.seed),
        SynthKind::Polynomial => gen_polynomial(args.n, noise, args.seed),
        SynthKind::Chessboard => gen_chessboard(args.n, cells, labels.into(), args.seed),
    }
    .map_err(|err| usage(err.to_string()))?;

    let mut csv = Vec::new();
    write_csv_to(&dataset, "y", &mut csv)
        .map_err(|err| CliError::Runtime(format!("rendering CSV: {err}")))?;

    let config = match args.kind {
        SynthKind::Chessboard => json!({
            "kind": args.kind.as_str(),
            "n": args.n,
            "cells": cells,
            "labels": labels.as_str(),
            "seed": args.seed,
            "out": args.out.display().to_string(),
            "threads": threads,
        }),
        _ => json!({
            "kind": args.kind.as_str(),
            "n": args.n,
            "noise": noise,
            "seed": args.seed,
            "out": args.out.display().to_string(),
            "threads": threads,
        }),
    };

    let mut outputs = RunOutputs::new("synth", Some(args.seed), config);
    outputs.add_file(args.out.clone(), csv);
    outputs.write_all(&manifest_path(&args.out))
}
