//! `origami bench`: the seeded benchmark simulations and oracle reports.
//!
//! Results land as long-format CSV (one row per seed, strategy, metric) plus
//! a JSON summary with means, standard errors, and paired-test p-values.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Subcommand};
use serde::Serialize;

use origami::bench::active::{simulate_active_learning, Acquisition, ActiveConfig, ActiveOutcome};
use origami::bench::oracle::grid_quadrature_gap;
use origami::bench::pipeline::{
    compare_strategies, simulate_pipeline, summarize, PipelineConfig, PipelineOutcome,
    PipelineStrategy,
};
use origami::bench::stats::mean_and_variance;
use origami::bench::world::{build_synthetic_world, FeatureConfig};
use origami::objective::{integral_objective, upper_pairs};
use origami::seed::substream;
use origami::simplex::{sample_simplex, Fold, SetExtension};
use origami::LossMatrix;

use crate::config::{configure_jobs, write_manifest, ConfigFile};
use crate::{CliError, CliResult};

#[derive(Subcommand)]
pub enum BenchCmd {
    /// Decision-pipeline comparison on the synthetic world.
    Pipeline(PipelineArgs),
    /// Active-learning acquisition comparison.
    Active(ActiveArgs),
    /// Monte Carlo vs quadrature agreement report.
    Oracle(OracleArgs),
}

pub fn run(cmd: BenchCmd) -> CliResult<()> {
    match cmd {
        BenchCmd::Pipeline(args) => pipeline(args),
        BenchCmd::Active(args) => active(args),
        BenchCmd::Oracle(args) => oracle(args),
    }
}

fn seed_list(base: u64, count: usize) -> Vec<u64> {
    (0..count as u64).map(|k| base + k).collect()
}

#[derive(Serialize)]
struct MetricRow<'a> {
    seed: u64,
    strategy: &'a str,
    metric: &'a str,
    value: f64,
}

fn write_long_csv(path: &PathBuf, rows: &[MetricRow<'_>]) -> CliResult<()> {
    let mut writer = csv::Writer::from_path(path).map_err(origami::Error::from)?;
    for row in rows {
        writer.serialize(row).map_err(origami::Error::from)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Args)]
pub struct PipelineArgs {
    /// World grid side length (outcomes = grid^2).
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    train_size: Option<usize>,
    #[arg(long)]
    test_size: Option<usize>,
    /// Comma-separated cell counts for the folded strategies.
    #[arg(long)]
    cells: Option<String>,
    /// Number of paired seeds.
    #[arg(long)]
    seeds: Option<usize>,
    /// Base seed; the seed list is base..base+count.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct PipelineResolved {
    grid: usize,
    train_size: usize,
    test_size: usize,
    cells: Vec<usize>,
    seeds: Vec<u64>,
    out: PathBuf,
    jobs: usize,
}

fn pipeline(args: PipelineArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let cells_text: String = file.resolve(args.cells, "cells", "5,10".into())?;
    let cells: Vec<usize> = cells_text
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Config(format!("bad cell count {c:?}")))
        })
        .collect::<CliResult<_>>()?;
    let resolved = PipelineResolved {
        grid: file.resolve(args.grid, "grid", 20)?,
        train_size: file.resolve(args.train_size, "train_size", 160)?,
        test_size: file.resolve(args.test_size, "test_size", 400)?,
        cells,
        seeds: seed_list(
            file.resolve_seed(args.seed)?,
            file.resolve(args.seeds, "seeds", 20)?,
        ),
        out: file
            .resolve_opt(args.out, "out")?
            .ok_or_else(|| CliError::Config("--out DIR is required".into()))?,
        jobs: file.resolve(args.jobs, "jobs", 0)?,
    };
    configure_jobs(resolved.jobs)?;
    let started = Instant::now();

    let world = build_synthetic_world(resolved.grid, &FeatureConfig::default(), 2024)?;
    let config = PipelineConfig {
        train_size: resolved.train_size,
        test_size: resolved.test_size,
        ..PipelineConfig::default()
    };
    let mut strategies = vec![
        PipelineStrategy::RandomAction,
        PipelineStrategy::DirectPolicy,
        PipelineStrategy::LocationPredict,
    ];
    for &n in &resolved.cells {
        strategies.push(PipelineStrategy::Origami { cells: n });
    }

    // A failing strategy still leaves the finished strategies' rows on disk.
    let mut rows: Vec<PipelineOutcome> = Vec::new();
    let mut failure: Option<CliError> = None;
    for strategy in &strategies {
        match simulate_pipeline(&world, strategy, &config, &resolved.seeds) {
            Ok(r) => rows.extend(r),
            Err(e) => {
                failure = Some(e.into());
                break;
            }
        }
    }

    std::fs::create_dir_all(&resolved.out)?;
    let mut long = Vec::new();
    for row in &rows {
        long.push(MetricRow {
            seed: row.seed,
            strategy: &row.strategy,
            metric: "mean_loss",
            value: row.mean_loss,
        });
        if let Some(acc) = row.predict_accuracy {
            long.push(MetricRow {
                seed: row.seed,
                strategy: &row.strategy,
                metric: "predict_accuracy",
                value: acc,
            });
        }
    }
    write_long_csv(&resolved.out.join("results.csv"), &long)?;
    if let Some(e) = failure {
        write_manifest(&resolved.out, "bench-pipeline", &resolved, "error", None)?;
        return Err(e);
    }

    let summaries = summarize(&rows);
    let mut comparisons = Vec::new();
    for &n in &resolved.cells {
        comparisons.push(compare_strategies(
            &rows,
            &format!("origami({n})"),
            "location-predict",
        )?);
    }
    comparisons.push(compare_strategies(
        &rows,
        "location-predict",
        "random-action",
    )?);
    let summary = serde_json::json!({
        "schema": 1,
        "strategies": summaries,
        "paired_comparisons": comparisons,
    });
    std::fs::write(
        resolved.out.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    write_manifest(
        &resolved.out,
        "bench-pipeline",
        &resolved,
        "ok",
        Some(started.elapsed().as_secs_f64()),
    )?;
    for s in summarize(&rows) {
        println!(
            "{}: mean loss {:.4} (se {:.4})",
            s.strategy, s.mean_loss, s.loss_standard_error
        );
    }
    Ok(())
}

#[derive(Args)]
pub struct ActiveArgs {
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    models: Option<usize>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    /// Comma-separated subset of random,worst-1,worst-3,origami.
    #[arg(long)]
    acquisitions: Option<String>,
    /// Cells for the fold-based acquisition.
    #[arg(long)]
    cells: Option<usize>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct ActiveResolved {
    classes: usize,
    models: usize,
    rounds: usize,
    batch: usize,
    acquisitions: Vec<String>,
    cells: usize,
    seeds: Vec<u64>,
    out: PathBuf,
    jobs: usize,
}

fn parse_acquisition(name: &str, cells: usize) -> CliResult<Acquisition> {
    if name == "random" {
        return Ok(Acquisition::Random);
    }
    if name == "origami" {
        return Ok(Acquisition::Origami { cells });
    }
    if let Some(n) = name.strip_prefix("worst-") {
        let n = n
            .parse::<usize>()
            .map_err(|_| CliError::Config(format!("bad acquisition {name:?}")))?;
        return Ok(Acquisition::WorstN(n));
    }
    Err(CliError::Config(format!(
        "unknown acquisition {name:?} (expected random | worst-N | origami)"
    )))
}

fn active(args: ActiveArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let acq_text: String = file.resolve(
        args.acquisitions,
        "acquisitions",
        "random,worst-1,worst-3,origami".into(),
    )?;
    let resolved = ActiveResolved {
        classes: file.resolve(args.classes, "classes", 20)?,
        models: file.resolve(args.models, "models", 3)?,
        rounds: file.resolve(args.rounds, "rounds", 30)?,
        batch: file.resolve(args.batch, "batch", 64)?,
        acquisitions: acq_text.split(',').map(|s| s.trim().to_string()).collect(),
        cells: file.resolve(args.cells, "cells", 5)?,
        seeds: seed_list(
            file.resolve_seed(args.seed)?,
            file.resolve(args.seeds, "seeds", 20)?,
        ),
        out: file
            .resolve_opt(args.out, "out")?
            .ok_or_else(|| CliError::Config("--out DIR is required".into()))?,
        jobs: file.resolve(args.jobs, "jobs", 0)?,
    };
    configure_jobs(resolved.jobs)?;
    let started = Instant::now();

    let cfg = ActiveConfig {
        class_count: resolved.classes,
        model_count: resolved.models,
        rounds: resolved.rounds,
        batch: resolved.batch,
        ..ActiveConfig::default()
    };
    // A failing acquisition still leaves the finished ones' rows on disk.
    let mut rows: Vec<ActiveOutcome> = Vec::new();
    let mut failure: Option<CliError> = None;
    for name in &resolved.acquisitions {
        let acquisition = parse_acquisition(name, resolved.cells)?;
        match simulate_active_learning(&cfg, &acquisition, &resolved.seeds) {
            Ok(r) => rows.extend(r),
            Err(e) => {
                failure = Some(e.into());
                break;
            }
        }
    }

    std::fs::create_dir_all(&resolved.out)?;
    let mut long = Vec::new();
    for row in &rows {
        long.push(MetricRow {
            seed: row.seed,
            strategy: &row.acquisition,
            metric: "overall_accuracy",
            value: row.overall_accuracy,
        });
        long.push(MetricRow {
            seed: row.seed,
            strategy: &row.acquisition,
            metric: "bottom_quartile_accuracy",
            value: row.bottom_quartile_accuracy,
        });
    }
    write_long_csv(&resolved.out.join("results.csv"), &long)?;
    if let Some(e) = failure {
        write_manifest(&resolved.out, "bench-active", &resolved, "error", None)?;
        return Err(e);
    }

    #[derive(Serialize)]
    struct AcqSummary {
        acquisition: String,
        seeds: usize,
        mean_overall: f64,
        se_overall: f64,
        mean_bottom_quartile: f64,
        se_bottom_quartile: f64,
    }
    let mut summaries = Vec::new();
    for name in &resolved.acquisitions {
        let label = parse_acquisition(name, resolved.cells)?.label();
        let overall: Vec<f64> = rows
            .iter()
            .filter(|r| r.acquisition == label)
            .map(|r| r.overall_accuracy)
            .collect();
        let bottom: Vec<f64> = rows
            .iter()
            .filter(|r| r.acquisition == label)
            .map(|r| r.bottom_quartile_accuracy)
            .collect();
        let (mo, vo) = mean_and_variance(&overall);
        let (mb, vb) = mean_and_variance(&bottom);
        summaries.push(AcqSummary {
            acquisition: label,
            seeds: overall.len(),
            mean_overall: mo,
            se_overall: (vo / overall.len() as f64).sqrt(),
            mean_bottom_quartile: mb,
            se_bottom_quartile: (vb / bottom.len() as f64).sqrt(),
        });
    }
    // Paired comparisons of every non-baseline acquisition against random,
    // when random is among the runs.
    #[derive(Serialize)]
    struct AcqComparison {
        better: String,
        worse: String,
        metric: String,
        test: origami::bench::stats::TTest,
    }
    let mut comparisons: Vec<AcqComparison> = Vec::new();
    let baseline = Acquisition::Random.label();
    if rows.iter().any(|r| r.acquisition == baseline) {
        for s in &summaries {
            if s.acquisition == baseline {
                continue;
            }
            for (metric, pick) in [
                ("overall_accuracy", true),
                ("bottom_quartile_accuracy", false),
            ] {
                let value = |r: &ActiveOutcome| {
                    if pick {
                        r.overall_accuracy
                    } else {
                        r.bottom_quartile_accuracy
                    }
                };
                let mut diffs = Vec::new();
                for cand in rows.iter().filter(|r| r.acquisition == s.acquisition) {
                    if let Some(base) = rows
                        .iter()
                        .find(|r| r.acquisition == baseline && r.seed == cand.seed)
                    {
                        diffs.push(value(cand) - value(base));
                    }
                }
                if diffs.len() >= 2 {
                    comparisons.push(AcqComparison {
                        better: s.acquisition.clone(),
                        worse: baseline.clone(),
                        metric: metric.into(),
                        test: origami::bench::stats::paired_t_test(&diffs)
                            .map_err(CliError::from)?,
                    });
                }
            }
        }
    }

    let summary = serde_json::json!({
        "schema": 1,
        "acquisitions": summaries,
        "paired_comparisons": comparisons,
    });
    std::fs::write(
        resolved.out.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    write_manifest(
        &resolved.out,
        "bench-active",
        &resolved,
        "ok",
        Some(started.elapsed().as_secs_f64()),
    )?;
    for s in &summaries {
        println!(
            "{}: overall {:.3} bottom-quartile {:.3}",
            s.acquisition, s.mean_overall, s.mean_bottom_quartile
        );
    }
    Ok(())
}

#[derive(Args)]
pub struct OracleArgs {
    #[arg(long)]
    actions: Option<usize>,
    #[arg(long)]
    outcomes: Option<usize>,
    /// Random instances to check.
    #[arg(long)]
    instances: Option<usize>,
    /// Monte Carlo samples per pair.
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Quadrature lattice step.
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize)]
struct OracleResolved {
    actions: usize,
    outcomes: usize,
    instances: usize,
    mc_samples: usize,
    step: f64,
    seed: u64,
    out: PathBuf,
}

#[derive(Serialize)]
struct OracleRow {
    instance: usize,
    pair_i: usize,
    pair_j: usize,
    mc_mean: f64,
    mc_standard_error: f64,
    quadrature: f64,
    deviation_in_se: f64,
}

fn oracle(args: OracleArgs) -> CliResult<()> {
    let file = ConfigFile::load(args.config.as_deref())?;
    let resolved = OracleResolved {
        actions: file.resolve(args.actions, "actions", 2)?,
        outcomes: file.resolve(args.outcomes, "outcomes", 3)?,
        instances: file.resolve(args.instances, "instances", 20)?,
        mc_samples: file.resolve(args.mc_samples, "mc_samples", 100_000)?,
        step: file.resolve(args.step, "step", 0.005)?,
        seed: file.resolve_seed(args.seed)?,
        out: file
            .resolve_opt(args.out, "out")?
            .ok_or_else(|| CliError::Config("--out DIR is required".into()))?,
    };
    let started = Instant::now();

    std::fs::create_dir_all(&resolved.out)?;
    let mut rows = Vec::new();
    let mut argmin_agreements = 0usize;
    for instance in 0..resolved.instances {
        let instance_seed = substream(resolved.seed, instance as u64);
        let loss = random_loss(resolved.actions, resolved.outcomes, instance_seed)?;
        let samples = sample_simplex(
            resolved.mc_samples,
            resolved.outcomes,
            substream(instance_seed, 1),
        )?;
        let mut best_mc = (f64::INFINITY, (0usize, 0usize));
        let mut best_quad = (f64::INFINITY, (0usize, 0usize));
        for (i, j) in upper_pairs(resolved.outcomes) {
            let fold = Fold::new(i, j)?;
            let mc = integral_objective(&loss, fold, &samples, SetExtension::WorstCase)?;
            let quad =
                grid_quadrature_gap(&loss, fold, SetExtension::WorstCase, resolved.step)?;
            let se = mc.standard_error().max(1e-300);
            if mc.mean < best_mc.0 {
                best_mc = (mc.mean, (i, j));
            }
            if quad < best_quad.0 {
                best_quad = (quad, (i, j));
            }
            rows.push(OracleRow {
                instance,
                pair_i: i,
                pair_j: j,
                mc_mean: mc.mean,
                mc_standard_error: mc.standard_error(),
                quadrature: quad,
                deviation_in_se: (mc.mean - quad).abs() / se,
            });
        }
        if best_mc.1 == best_quad.1 {
            argmin_agreements += 1;
        }
    }

    let mut writer = csv::Writer::from_path(resolved.out.join("agreement.csv"))
        .map_err(origami::Error::from)?;
    for row in &rows {
        writer.serialize(row).map_err(origami::Error::from)?;
    }
    writer.flush()?;

    let worst = rows
        .iter()
        .map(|r| r.deviation_in_se)
        .fold(f64::NEG_INFINITY, f64::max);
    let summary = serde_json::json!({
        "schema": 1,
        "instances": resolved.instances,
        "argmin_agreements": argmin_agreements,
        "worst_deviation_in_se": worst,
    });
    std::fs::write(
        resolved.out.join("summary.json"),
        serde_json::to_string_pretty(&summary)?,
    )?;
    write_manifest(
        &resolved.out,
        "bench-oracle",
        &resolved,
        "ok",
        Some(started.elapsed().as_secs_f64()),
    )?;
    println!(
        "argmin agreement: {argmin_agreements}/{} worst deviation: {worst:.2} se",
        resolved.instances
    );
    Ok(())
}

fn random_loss(actions: usize, outcomes: usize, seed: u64) -> CliResult<LossMatrix> {
    Ok(origami::loss::uniform_loss_matrix(actions, outcomes, seed)?)
}
