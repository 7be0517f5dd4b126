//! Decision pipelines over the synthetic world.
//!
//! Four ways to turn a context into one of the world's three response
//! actions:
//!
//! * `random-action` — the uniform policy, evaluated in expectation;
//! * `direct-policy` — a softmax policy over actions trained to minimize
//!   its own expected decision loss;
//! * `location-predict` — a fine-grained location classifier; act optimally
//!   for the predicted location;
//! * `origami(n)` — fold the world's loss matrix down to `n` cells, train a
//!   cell classifier on projected labels, and act with the cell's
//!   most-frequently-optimal action (plurality of the per-location best
//!   actions, smallest index on ties).
//!
//! With `n = C` the fold sequence is empty and `origami(n)` reproduces
//! `location-predict` decision for decision.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::objective::Objective;
use crate::seed::substream;
use crate::simplex::SetExtension;
use crate::tree::{project_dataset, run_origami, Partition, StopRule};

use super::predictor::{train_classifier, train_policy, PredictorConfig};
use super::stats::{mean_and_variance, paired_t_test, TTest};
use super::world::SyntheticWorld;

/// A way of acting in the world.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PipelineStrategy {
    RandomAction,
    DirectPolicy,
    LocationPredict,
    Origami { cells: usize },
}

impl PipelineStrategy {
    pub fn label(&self) -> String {
        match self {
            PipelineStrategy::RandomAction => "random-action".into(),
            PipelineStrategy::DirectPolicy => "direct-policy".into(),
            PipelineStrategy::LocationPredict => "location-predict".into(),
            PipelineStrategy::Origami { cells } => format!("origami({cells})"),
        }
    }
}

/// Scale of one simulated deployment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub train_size: usize,
    pub test_size: usize,
    pub predictor: PredictorConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            train_size: 160,
            test_size: 400,
            predictor: PredictorConfig::default(),
        }
    }
}

/// One (strategy, seed) result row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineOutcome {
    pub strategy: String,
    pub seed: u64,
    pub mean_loss: f64,
    /// Top-1 accuracy of the strategy's predictor at its own granularity;
    /// absent for strategies that predict nothing.
    pub predict_accuracy: Option<f64>,
}

/// A fold computed once per strategy: the partition depends only on the
/// world's loss matrix, so every seed shares it (and pairs exactly).
struct FoldPlan {
    tree: crate::tree::FoldTree,
    partition: Partition,
    actions: Vec<usize>,
}

/// Run one strategy over a list of seeds. Data and training randomness are
/// derived from each seed alone, so rows pair across strategies.
pub fn simulate_pipeline(
    world: &SyntheticWorld,
    strategy: &PipelineStrategy,
    config: &PipelineConfig,
    seeds: &[u64],
) -> Result<Vec<PipelineOutcome>> {
    if world.outcome_count() < 2 {
        return Err(Error::InvalidArgument(
            "world must have at least two locations".into(),
        ));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("no seeds given".into()));
    }
    let plan = match strategy {
        PipelineStrategy::Origami { cells } => {
            // The integral objective keeps merged locations genuinely
            // interchangeable for the decision; a modest sample count per
            // step is enough to separate good merges from bad ones.
            let run = run_origami(
                &world.loss,
                &Objective::Integral { samples: 64 },
                SetExtension::WorstCase,
                None,
                &StopRule::TargetCells(*cells),
                substream(world.seed, 7),
            )?;
            let actions = cell_actions(&world.loss, &run.partition);
            Some(FoldPlan {
                tree: run.tree,
                partition: run.partition,
                actions,
            })
        }
        _ => None,
    };
    seeds
        .par_iter()
        .map(|&seed| simulate_one(world, strategy, config, plan.as_ref(), seed))
        .collect()
}

fn simulate_one(
    world: &SyntheticWorld,
    strategy: &PipelineStrategy,
    config: &PipelineConfig,
    plan: Option<&FoldPlan>,
    seed: u64,
) -> Result<PipelineOutcome> {
    let data = world.sample_dataset(config.train_size + config.test_size, substream(seed, 0))?;
    let (train, test) = data.split_at(config.train_size)?;
    let loss = &world.loss;
    let train_seed = substream(seed, 1);

    let (mean_loss, predict_accuracy) = match strategy {
        PipelineStrategy::RandomAction => {
            // Exact expectation of the uniform policy; no sampling noise.
            let mut total = 0.0;
            for &z in &test.labels {
                let mut sum = 0.0;
                for a in 0..loss.action_count() {
                    sum += loss.entry(a, z);
                }
                total += sum / loss.action_count() as f64;
            }
            (total / test.len() as f64, None)
        }
        PipelineStrategy::DirectPolicy => {
            let per_action: Vec<Vec<f64>> = train
                .labels
                .iter()
                .map(|&z| (0..loss.action_count()).map(|a| loss.entry(a, z)).collect())
                .collect();
            let policy = train_policy(
                loss.action_count(),
                &train.contexts,
                &per_action,
                &config.predictor,
                train_seed,
            )?;
            let mut total = 0.0;
            for (x, &z) in test.contexts.iter().zip(&test.labels) {
                let action = policy.predict(x)?;
                total += loss.entry(action, z);
            }
            (total / test.len() as f64, None)
        }
        PipelineStrategy::LocationPredict => {
            let model = train_classifier(
                world.outcome_count(),
                &train.contexts,
                &train.labels,
                &config.predictor,
                train_seed,
            )?;
            let mut total = 0.0;
            let mut hits = 0usize;
            for (x, &z) in test.contexts.iter().zip(&test.labels) {
                let predicted = model.predict(x)?;
                if predicted == z {
                    hits += 1;
                }
                total += loss.entry(best_action_for(loss, predicted), z);
            }
            (
                total / test.len() as f64,
                Some(hits as f64 / test.len() as f64),
            )
        }
        PipelineStrategy::Origami { .. } => {
            let plan = plan.expect("fold plan prepared for origami strategies");
            let cell_labels = project_dataset(&plan.tree, &train.labels)?;
            let model = train_classifier(
                plan.partition.cell_count(),
                &train.contexts,
                &cell_labels,
                &config.predictor,
                train_seed,
            )?;
            let test_cells = project_dataset(&plan.tree, &test.labels)?;
            let mut total = 0.0;
            let mut hits = 0usize;
            for ((x, &z), &true_cell) in
                test.contexts.iter().zip(&test.labels).zip(&test_cells)
            {
                let predicted_cell = model.predict(x)?;
                if predicted_cell == true_cell {
                    hits += 1;
                }
                total += loss.entry(plan.actions[predicted_cell], z);
            }
            (
                total / test.len() as f64,
                Some(hits as f64 / test.len() as f64),
            )
        }
    };

    Ok(PipelineOutcome {
        strategy: strategy.label(),
        seed,
        mean_loss,
        predict_accuracy,
    })
}

/// Best action against a single known location.
fn best_action_for(loss: &crate::loss::LossMatrix, location: usize) -> usize {
    let mut best = f64::INFINITY;
    let mut arg = 0;
    for a in 0..loss.action_count() {
        let v = loss.entry(a, location);
        if v < best {
            best = v;
            arg = a;
        }
    }
    arg
}

/// The most-frequently-optimal action of every cell: count each member
/// location's best action and take the plurality winner, smallest action
/// index on ties.
pub fn cell_actions(loss: &crate::loss::LossMatrix, partition: &Partition) -> Vec<usize> {
    partition
        .cells()
        .iter()
        .map(|cell| {
            let mut votes = vec![0usize; loss.action_count()];
            for &z in cell {
                votes[best_action_for(loss, z)] += 1;
            }
            let mut best = 0usize;
            for (a, &v) in votes.iter().enumerate() {
                if v > votes[best] {
                    best = a;
                }
            }
            best
        })
        .collect()
}

/// Aggregate of one strategy across seeds.
#[derive(Debug, Clone, Serialize)]
pub struct StrategySummary {
    pub strategy: String,
    pub seeds: usize,
    pub mean_loss: f64,
    pub loss_standard_error: f64,
    pub mean_predict_accuracy: Option<f64>,
}

/// A paired per-seed comparison: positive `mean_diff` means `better` won.
#[derive(Debug, Clone, Serialize)]
pub struct PairedComparison {
    pub better: String,
    pub worse: String,
    /// Mean of (worse - better) per seed.
    pub test: TTest,
}

pub fn summarize(rows: &[PipelineOutcome]) -> Vec<StrategySummary> {
    let mut labels: Vec<String> = Vec::new();
    for row in rows {
        if !labels.contains(&row.strategy) {
            labels.push(row.strategy.clone());
        }
    }
    labels
        .into_iter()
        .map(|label| {
            let losses: Vec<f64> = rows
                .iter()
                .filter(|r| r.strategy == label)
                .map(|r| r.mean_loss)
                .collect();
            let accs: Vec<f64> = rows
                .iter()
                .filter(|r| r.strategy == label)
                .filter_map(|r| r.predict_accuracy)
                .collect();
            let (mean, var) = mean_and_variance(&losses);
            StrategySummary {
                strategy: label,
                seeds: losses.len(),
                mean_loss: mean,
                loss_standard_error: (var / losses.len() as f64).sqrt(),
                mean_predict_accuracy: if accs.is_empty() {
                    None
                } else {
                    Some(accs.iter().sum::<f64>() / accs.len() as f64)
                },
            }
        })
        .collect()
}

/// Paired test that `better` has strictly lower loss than `worse`, seed by
/// seed.
pub fn compare_strategies(
    rows: &[PipelineOutcome],
    better: &str,
    worse: &str,
) -> Result<PairedComparison> {
    let mut diffs = Vec::new();
    for b in rows.iter().filter(|r| r.strategy == better) {
        if let Some(w) = rows
            .iter()
            .find(|r| r.strategy == worse && r.seed == b.seed)
        {
            diffs.push(w.mean_loss - b.mean_loss);
        }
    }
    if diffs.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "not enough paired seeds between {better} and {worse}"
        )));
    }
    Ok(PairedComparison {
        better: better.into(),
        worse: worse.into(),
        test: paired_t_test(&diffs)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use super::super::world::{build_synthetic_world, FeatureConfig};

    fn small_world() -> SyntheticWorld {
        build_synthetic_world(4, &FeatureConfig::default(), 77).unwrap()
    }

    fn small_config() -> PipelineConfig {
        PipelineConfig {
            train_size: 60,
            test_size: 80,
            predictor: PredictorConfig {
                epochs: 40,
                ..PredictorConfig::default()
            },
        }
    }

    #[test]
    fn constant_loss_ties_every_strategy() {
        let mut world = small_world();
        let c = world.outcome_count();
        world.loss =
            crate::loss::LossMatrix::from_rows(vec![vec![0.4; c], vec![0.4; c], vec![0.4; c]])
                .unwrap();
        let config = small_config();
        let seeds = [1u64, 2];
        let mut means = Vec::new();
        for strategy in [
            PipelineStrategy::RandomAction,
            PipelineStrategy::DirectPolicy,
            PipelineStrategy::LocationPredict,
            PipelineStrategy::Origami { cells: 4 },
        ] {
            let rows = simulate_pipeline(&world, &strategy, &config, &seeds).unwrap();
            means.push(rows[0].mean_loss);
        }
        for m in &means {
            assert!((m - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_partition_reproduces_location_predict() {
        let world = small_world();
        let config = small_config();
        let seeds = [3u64, 4, 5];
        let fine = simulate_pipeline(&world, &PipelineStrategy::LocationPredict, &config, &seeds)
            .unwrap();
        let folded = simulate_pipeline(
            &world,
            &PipelineStrategy::Origami {
                cells: world.outcome_count(),
            },
            &config,
            &seeds,
        )
        .unwrap();
        for (a, b) in fine.iter().zip(&folded) {
            assert_eq!(a.mean_loss, b.mean_loss);
            assert_eq!(a.predict_accuracy, b.predict_accuracy);
        }
    }

    #[test]
    fn degenerate_world_is_rejected() {
        let world = small_world();
        let mut tiny = world.clone();
        tiny.loss = crate::loss::LossMatrix::from_rows(vec![vec![0.1]]).unwrap();
        tiny.grid_size = 1;
        tiny.features.truncate(1);
        let err = simulate_pipeline(
            &tiny,
            &PipelineStrategy::RandomAction,
            &small_config(),
            &[1],
        );
        assert!(err.is_err());
    }

    #[test]
    fn cell_actions_take_the_plurality() {
        let loss = crate::loss::LossMatrix::from_rows(vec![
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let partition = Partition::new(vec![vec![0, 1, 2]]).unwrap();
        // Best actions per location: 0, 0, 1 -> plurality 0.
        assert_eq!(cell_actions(&loss, &partition), vec![0]);
    }

    #[test]
    fn summaries_and_comparisons_line_up() {
        let world = small_world();
        let config = small_config();
        let seeds: Vec<u64> = (0..4).collect();
        let mut rows =
            simulate_pipeline(&world, &PipelineStrategy::RandomAction, &config, &seeds).unwrap();
        rows.extend(
            simulate_pipeline(&world, &PipelineStrategy::LocationPredict, &config, &seeds)
                .unwrap(),
        );
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 2);
        assert_eq!(summary[0].seeds, 4);
        let cmp = compare_strategies(&rows, "location-predict", "random-action").unwrap();
        assert_eq!(cmp.test.degrees_of_freedom, 3);
    }
}
