//! `origami gap`: cumulative H-entropy gap of an existing fold tree.

use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use origami::cumulative_gap;

use crate::commands::shared::{load_probe, parse_extension};
use crate::config::ConfigFile;
use crate::{CliError, CliResult};

#[derive(Args)]
pub struct GapArgs {
    /// Loss matrix file (.csv or .json).
    #[arg(long)]
    loss: Option<PathBuf>,
    /// Fold tree JSON produced by `fold`.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Probe vectors CSV; drawn uniformly when absent.
    #[arg(long)]
    probe: Option<PathBuf>,
    /// Probe size when drawing uniformly.
    #[arg(long)]
    probe_samples: Option<usize>,
    /// worst-case | weighted-sum | sum.
    #[arg(long)]
    extension: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write per-probe gaps to this CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Serialize)]
struct GapRow {
    index: usize,
    gap: f64,
}

pub fn run(args: GapArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let loss_path: PathBuf = file
        .resolve_opt(args.loss, "loss")?
        .ok_or_else(|| CliError::Config("--loss PATH is required".into()))?;
    let tree_path: PathBuf = file
        .resolve_opt(args.tree, "tree")?
        .ok_or_else(|| CliError::Config("--tree PATH is required".into()))?;
    let probe_path = file.resolve_opt(args.probe, "probe")?;
    let probe_samples = file.resolve(args.probe_samples, "probe_samples", 10_000)?;
    let extension = file.resolve(args.extension, "extension", "worst-case".into())?;
    let seed = file.resolve_seed(args.seed)?;
    let csv_path = file.resolve_opt(args.csv, "csv")?;

    let labeled = origami::io::load_loss(&loss_path)?;
    let tree = origami::io::read_tree_json(std::fs::File::open(&tree_path)?)?;
    let ext = parse_extension(&extension)?;
    let probe = load_probe(
        probe_path.as_deref(),
        probe_samples,
        labeled.matrix.outcome_count(),
        seed,
    )?;

    let mean = cumulative_gap(&tree, &labeled.matrix, &probe, ext)?;

    // Per-sample gaps for the max and the optional CSV dump.
    let mut max_gap = f64::NEG_INFINITY;
    let mut rows = Vec::with_capacity(probe.len());
    for (index, p) in probe.iter().enumerate() {
        let gap = cumulative_gap(&tree, &labeled.matrix, std::slice::from_ref(p), ext)?;
        if gap > max_gap {
            max_gap = gap;
        }
        rows.push(GapRow { index, gap });
    }

    if let Some(path) = csv_path {
        let mut writer = csv::Writer::from_path(&path).map_err(origami::Error::from)?;
        for row in &rows {
            writer.serialize(row).map_err(origami::Error::from)?;
        }
        writer.flush()?;
    }

    println!("mean gap: {mean}");
    println!("max gap: {max_gap}");
    Ok(())
}
