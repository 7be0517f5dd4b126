//! `origami surrogate`: train, evaluate, and latency-bench the amortized
//! objective.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Subcommand};
use serde::Serialize;

use origami::seed::substream;
use origami::surrogate::{
    bench_fold_latency, evaluate_surrogate, generate_surrogate_dataset, train_surrogate,
    LatencyMethod, SurrogateDataset, SurrogateModel, TrainConfig,
};

use crate::config::{configure_jobs, write_manifest, ConfigFile};
use crate::{CliError, CliResult};

#[derive(Subcommand)]
pub enum SurrogateCmd {
    /// Generate (or load) a dataset, fit a model, and report held-out
    /// quality.
    Train(TrainArgs),
    /// Evaluate a saved model on freshly generated labeled matrices.
    Eval(EvalArgs),
    /// Median per-fold-decision latency of the objective methods.
    Bench(BenchArgs),
}

pub fn run(cmd: SurrogateCmd) -> CliResult<()> {
    match cmd {
        SurrogateCmd::Train(args) => train(args),
        SurrogateCmd::Eval(args) => eval(args),
        SurrogateCmd::Bench(args) => bench(args),
    }
}

#[derive(Args)]
pub struct TrainArgs {
    #[arg(long)]
    actions: Option<usize>,
    #[arg(long)]
    outcomes: Option<usize>,
    /// Training tuples to generate.
    #[arg(long)]
    examples: Option<usize>,
    /// Monte Carlo particles per target matrix.
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Where the model JSON goes.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reuse a previously saved dataset instead of generating one.
    #[arg(long)]
    dataset_in: Option<PathBuf>,
    /// Also save the generated dataset here.
    #[arg(long)]
    dataset_out: Option<PathBuf>,
    /// Loss-curve CSV (epoch, train loss, validation loss).
    #[arg(long)]
    curves: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct TrainResolved {
    actions: usize,
    outcomes: usize,
    examples: usize,
    mc_samples: usize,
    epochs: usize,
    seed: u64,
    jobs: usize,
    out: PathBuf,
}

fn train(args: TrainArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let resolved = TrainResolved {
        actions: file.resolve(args.actions, "actions", 2)?,
        outcomes: file.resolve(args.outcomes, "outcomes", 3)?,
        examples: file.resolve(args.examples, "examples", 10_000)?,
        mc_samples: file.resolve(args.mc_samples, "mc_samples", 1000)?,
        epochs: file.resolve(args.epochs, "epochs", 500)?,
        seed: file.resolve_seed(args.seed)?,
        jobs: file.resolve(args.jobs, "jobs", 0)?,
        out: file
            .resolve_opt(args.out, "out")?
            .ok_or_else(|| CliError::Config("--out PATH is required".into()))?,
    };
    configure_jobs(resolved.jobs)?;
    let started = Instant::now();

    let dataset = match &args.dataset_in {
        Some(path) => SurrogateDataset::load(path)?,
        None => generate_surrogate_dataset(
            resolved.actions,
            resolved.outcomes,
            resolved.examples,
            resolved.mc_samples,
            resolved.seed,
        )?,
    };
    if let Some(path) = &args.dataset_out {
        dataset.save(path)?;
    }

    let (train_set, val_set, test_set) = dataset.split(substream(resolved.seed, 1));
    let cfg = TrainConfig {
        epochs: resolved.epochs,
        ..TrainConfig::default()
    };
    let (model, report) =
        train_surrogate(&train_set, Some(&val_set), &cfg, substream(resolved.seed, 2))?;
    model.save(&resolved.out)?;

    if let Some(path) = &args.curves {
        let mut writer = csv::Writer::from_path(path).map_err(origami::Error::from)?;
        writer
            .write_record(["epoch", "train_loss", "val_loss"])
            .map_err(origami::Error::from)?;
        for (epoch, train_loss) in report.train_losses.iter().enumerate() {
            let val = report
                .val_losses
                .get(epoch)
                .map(|v| v.to_string())
                .unwrap_or_default();
            writer
                .write_record([epoch.to_string(), train_loss.to_string(), val])
                .map_err(origami::Error::from)?;
        }
        writer.flush()?;
    }

    let eval = if test_set.is_empty() {
        None
    } else {
        Some(evaluate_surrogate(&model, &test_set)?)
    };
    if let Some(parent) = resolved.out.parent() {
        let dir = if parent.as_os_str().is_empty() {
            PathBuf::from(".")
        } else {
            parent.to_path_buf()
        };
        write_manifest(
            &dir,
            "surrogate-train",
            &resolved,
            "ok",
            Some(started.elapsed().as_secs_f64()),
        )?;
    }
    println!(
        "final train loss: {}",
        model.meta.final_train_loss
    );
    if let Some(e) = eval {
        println!(
            "test rmse: {} argmin accuracy: {}",
            e.rmse, e.argmin_accuracy
        );
    }
    if !report.smoothed_monotone {
        eprintln!("warning: smoothed training loss was not monotone");
    }
    Ok(())
}

#[derive(Args)]
pub struct EvalArgs {
    /// Saved model JSON.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Fresh evaluation tuples to generate.
    #[arg(long)]
    examples: Option<usize>,
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Report JSON path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn eval(args: EvalArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let model_path: PathBuf = file
        .resolve_opt(args.model, "model")?
        .ok_or_else(|| CliError::Config("--model PATH is required".into()))?;
    let examples = file.resolve(args.examples, "examples", 1000)?;
    let mc_samples = file.resolve(args.mc_samples, "mc_samples", 1000)?;
    let seed = file.resolve_seed(args.seed)?;
    configure_jobs(file.resolve(args.jobs, "jobs", 0)?)?;

    let model = SurrogateModel::load(&model_path)?;
    let test = generate_surrogate_dataset(
        model.action_count,
        model.outcome_count,
        examples,
        mc_samples,
        substream(seed, 0xE7A1),
    )?;
    let report = evaluate_surrogate(&model, &test)?;
    let json = serde_json::json!({
        "schema": 1,
        "model": model_path,
        "actions": model.action_count,
        "outcomes": model.outcome_count,
        "examples": report.examples,
        "rmse": report.rmse,
        "argmin_accuracy": report.argmin_accuracy,
    });
    let text = serde_json::to_string_pretty(&json)?;
    match file.resolve_opt(args.out, "out")? {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long)]
    actions: Option<usize>,
    #[arg(long)]
    outcomes: Option<usize>,
    /// Comma-separated subset of integral,vertex,surrogate.
    #[arg(long)]
    methods: Option<String>,
    /// Model file, needed when methods include surrogate.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Monte Carlo samples for the integral method.
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Latency CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn bench(args: BenchArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let actions = file.resolve(args.actions, "actions", 2)?;
    let outcomes = file.resolve(args.outcomes, "outcomes", 8)?;
    let methods_text: String =
        file.resolve(args.methods, "methods", "integral,vertex,surrogate".into())?;
    let model_path = file.resolve_opt(args.model, "model")?;
    let mc_samples = file.resolve(args.mc_samples, "mc_samples", 1000)?;
    let repeats = file.resolve(args.repeats, "repeats", 51)?;
    let seed = file.resolve_seed(args.seed)?;
    let out: PathBuf = file
        .resolve_opt(args.out, "out")?
        .ok_or_else(|| CliError::Config("--out PATH is required".into()))?;

    let mut methods = Vec::new();
    for name in methods_text.split(',') {
        match name.trim() {
            "integral" => methods.push(LatencyMethod::Integral {
                samples: mc_samples,
            }),
            "vertex" => methods.push(LatencyMethod::Vertex),
            "surrogate" => {
                let path = model_path.as_ref().ok_or_else(|| {
                    CliError::Config("surrogate latency needs --model PATH".into())
                })?;
                let model = SurrogateModel::load(path)?;
                if model.action_count != actions || model.outcome_count != outcomes {
                    return Err(CliError::Config(format!(
                        "model shape {} x {} does not match --actions {actions} --outcomes {outcomes}",
                        model.action_count, model.outcome_count
                    )));
                }
                methods.push(LatencyMethod::Surrogate(Arc::new(model)));
            }
            other => {
                return Err(CliError::Config(format!(
                    "unknown latency method {other:?}"
                )))
            }
        }
    }

    let rows = bench_fold_latency(actions, outcomes, &methods, repeats, seed)?;
    let mut writer = csv::Writer::from_path(&out).map_err(origami::Error::from)?;
    for row in &rows {
        writer.serialize(row).map_err(origami::Error::from)?;
        println!(
            "{}: median {:.3e} s over {} repeats",
            row.method, row.median_seconds, row.repeats
        );
    }
    writer.flush()?;
    Ok(())
}
