//! `origami fold`: greedy coarsening of a loss-matrix file.

use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use origami::tree::StopRule;
use origami::{run_origami, sample_simplex};

use crate::commands::shared::{parse_extension, ObjectiveSpec};
use crate::config::{configure_jobs, write_manifest, ConfigFile};
use crate::{CliError, CliResult};

#[derive(Args)]
pub struct FoldArgs {
    /// Loss matrix file (.csv or .json).
    #[arg(long)]
    loss: Option<PathBuf>,
    /// vertex | integral | max-increase | surrogate.
    #[arg(long)]
    objective: Option<String>,
    /// Monte Carlo samples per fold decision (integral objective).
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Restarts of the concave-convex search (max-increase objective).
    #[arg(long)]
    ccp_restarts: Option<usize>,
    /// Convergence tolerance of the concave-convex search.
    #[arg(long)]
    ccp_tol: Option<f64>,
    /// Trained surrogate model file (surrogate objective).
    #[arg(long)]
    surrogate_model: Option<PathBuf>,
    /// worst-case | weighted-sum | sum.
    #[arg(long)]
    extension: Option<String>,
    /// Reference distribution CSV (one row), folded alongside the matrix;
    /// required by the weighted-sum extension.
    #[arg(long)]
    reference: Option<PathBuf>,
    /// Stop when this many cells remain.
    #[arg(long)]
    cells: Option<usize>,
    /// Stop after exactly this many folds.
    #[arg(long)]
    folds: Option<usize>,
    /// Stop before the cumulative gap over a fresh probe would exceed this.
    #[arg(long)]
    gap_tol: Option<f64>,
    /// Probe size for --gap-tol.
    #[arg(long)]
    probe_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = library default).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// The resolved, fully serializable run configuration: a run is
/// reproducible from this object alone.
#[derive(Debug, Clone, Serialize)]
pub struct FoldConfig {
    pub loss: PathBuf,
    pub objective: ObjectiveSpec,
    pub extension: String,
    pub reference: Option<PathBuf>,
    pub stop: StopSpec,
    pub seed: u64,
    pub jobs: usize,
    pub out: PathBuf,
}

#[derive(Debug, Clone, Serialize)]
pub struct StopSpec {
    pub kind: String,
    pub cells: Option<usize>,
    pub folds: Option<usize>,
    pub gap_tolerance: Option<f64>,
    pub probe_samples: Option<usize>,
}

pub fn run(args: FoldArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let loss_path: PathBuf = file
        .resolve_opt(args.loss, "loss")?
        .ok_or_else(|| CliError::Config("--loss PATH is required".into()))?;
    let out: PathBuf = file
        .resolve_opt(args.out, "out")?
        .ok_or_else(|| CliError::Config("--out DIR is required".into()))?;

    let objective = ObjectiveSpec {
        kind: file.resolve(args.objective, "objective", "vertex".into())?,
        mc_samples: file.resolve(args.mc_samples, "mc_samples", 1000)?,
        ccp_restarts: file.resolve(args.ccp_restarts, "ccp_restarts", 5)?,
        ccp_tolerance: file.resolve(args.ccp_tol, "ccp_tol", 1e-6)?,
        surrogate_model: file.resolve_opt(args.surrogate_model, "surrogate_model")?,
    };
    let extension = file.resolve(args.extension, "extension", "worst-case".into())?;
    let reference = file.resolve_opt(args.reference, "reference")?;
    let seed = file.resolve_seed(args.seed)?;
    let jobs = file.resolve(args.jobs, "jobs", 0)?;

    let cells = file.resolve_opt(args.cells, "cells")?;
    let folds = file.resolve_opt(args.folds, "folds")?;
    let gap_tol = file.resolve_opt(args.gap_tol, "gap_tol")?;
    let probe_samples = file.resolve(args.probe_samples, "probe_samples", 10_000)?;
    let stop = match (cells, folds, gap_tol) {
        (Some(n), None, None) => StopSpec {
            kind: "target-cells".into(),
            cells: Some(n),
            folds: None,
            gap_tolerance: None,
            probe_samples: None,
        },
        (None, Some(k), None) => StopSpec {
            kind: "fold-count".into(),
            cells: None,
            folds: Some(k),
            gap_tolerance: None,
            probe_samples: None,
        },
        (None, None, Some(t)) => StopSpec {
            kind: "gap-tolerance".into(),
            cells: None,
            folds: None,
            gap_tolerance: Some(t),
            probe_samples: Some(probe_samples),
        },
        _ => {
            return Err(CliError::Config(
                "exactly one of --cells N, --folds K, --gap-tol T is required".into(),
            ))
        }
    };

    let config = FoldConfig {
        loss: loss_path.clone(),
        objective,
        extension: extension.clone(),
        reference: reference.clone(),
        stop,
        seed,
        jobs,
        out: out.clone(),
    };

    configure_jobs(jobs)?;
    let started = Instant::now();
    let result = execute(&config);
    let status = if result.is_ok() { "ok" } else { "error" };
    write_manifest(&out, "fold", &config, status, Some(started.elapsed().as_secs_f64()))?;
    result
}

fn execute(config: &FoldConfig) -> CliResult<()> {
    let labeled = origami::io::load_loss(&config.loss)?;
    let ext = parse_extension(&config.extension)?;
    let objective = config.objective.build()?;
    let reference = match &config.reference {
        Some(path) => {
            let file = std::fs::File::open(path)?;
            let mut vectors = origami::io::read_prob_vectors_csv(file)?;
            Some(vectors.swap_remove(0))
        }
        None => None,
    };
    let stop = match config.stop.kind.as_str() {
        "target-cells" => StopRule::TargetCells(config.stop.cells.expect("resolved")),
        "fold-count" => StopRule::FoldCount(config.stop.folds.expect("resolved")),
        _ => StopRule::GapTolerance {
            tolerance: config.stop.gap_tolerance.expect("resolved"),
            probe: sample_simplex(
                config.stop.probe_samples.expect("resolved"),
                labeled.matrix.outcome_count(),
                origami::seed::substream(config.seed, 0xBEEF),
            )?,
        },
    };

    let run = run_origami(
        &labeled.matrix,
        &objective,
        ext,
        reference.as_ref(),
        &stop,
        config.seed,
    )?;

    std::fs::create_dir_all(&config.out)?;
    let tree_file = std::fs::File::create(config.out.join("fold_tree.json"))?;
    origami::io::write_tree_json(&run.tree, tree_file)?;

    let cell_labels = labeled.outcome_labels.as_ref().map(|names| {
        run.partition
            .cells()
            .iter()
            .map(|cell| {
                cell.iter()
                    .map(|&z| names[z].as_str())
                    .collect::<Vec<_>>()
                    .join("+")
            })
            .collect()
    });
    let partition_file = std::fs::File::create(config.out.join("partition.json"))?;
    origami::io::write_partition_json(&run.partition, cell_labels.clone(), partition_file)?;

    let folded = origami::io::LabeledLoss {
        matrix: run.folded_loss.clone(),
        action_labels: labeled.action_labels.clone(),
        outcome_labels: cell_labels,
    };
    let loss_file = std::fs::File::create(config.out.join("folded_loss.csv"))?;
    origami::io::write_loss_csv(&folded, loss_file)?;

    println!(
        "folded {} outcomes into {} cells in {} steps",
        run.tree.leaf_count(),
        run.partition.cell_count(),
        run.tree.fold_count()
    );
    Ok(())
}
