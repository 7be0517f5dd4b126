//! `origami inspect`: dump the objective matrix of one fold decision.

use std::path::PathBuf;

use clap::Args;

use origami::objective::objective_matrix;

use crate::commands::shared::{parse_extension, ObjectiveSpec};
use crate::config::ConfigFile;
use crate::{CliError, CliResult};

#[derive(Args)]
pub struct InspectArgs {
    /// Loss matrix file (.csv or .json).
    #[arg(long)]
    loss: Option<PathBuf>,
    /// vertex | integral | max-increase | surrogate.
    #[arg(long)]
    objective: Option<String>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    ccp_restarts: Option<usize>,
    #[arg(long)]
    ccp_tol: Option<f64>,
    #[arg(long)]
    surrogate_model: Option<PathBuf>,
    /// worst-case | weighted-sum | sum.
    #[arg(long)]
    extension: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV (upper triangle; other cells empty).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

pub fn run(args: InspectArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let loss_path: PathBuf = file
        .resolve_opt(args.loss, "loss")?
        .ok_or_else(|| CliError::Config("--loss PATH is required".into()))?;
    let out: PathBuf = file
        .resolve_opt(args.out, "out")?
        .ok_or_else(|| CliError::Config("--out PATH is required".into()))?;
    let spec = ObjectiveSpec {
        kind: file.resolve(args.objective, "objective", "vertex".into())?,
        mc_samples: file.resolve(args.mc_samples, "mc_samples", 1000)?,
        ccp_restarts: file.resolve(args.ccp_restarts, "ccp_restarts", 5)?,
        ccp_tolerance: file.resolve(args.ccp_tol, "ccp_tol", 1e-6)?,
        surrogate_model: file.resolve_opt(args.surrogate_model, "surrogate_model")?,
    };
    let extension = file.resolve(args.extension, "extension", "worst-case".into())?;
    let seed = file.resolve_seed(args.seed)?;

    let labeled = origami::io::load_loss(&loss_path)?;
    let matrix = objective_matrix(
        &labeled.matrix,
        &spec.build()?,
        parse_extension(&extension)?,
        seed,
    )?;
    let (i, j) = matrix.argmin();

    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    origami::io::write_objective_csv(&matrix, std::fs::File::create(&out)?)?;
    println!("best fold: {i}->{j} (objective {})", matrix.get(i, j));
    Ok(())
}
