//! Amortizing the integral objective with a learned regressor.
//!
//! Scoring every pair by Monte Carlo costs `O(N |A| C^2)` per fold decision.
//! For a fixed matrix shape, that map — flattened loss matrix in, the
//! `C (C - 1) / 2` upper-triangular objective entries out — can be fit
//! offline by a small feedforward network and then evaluated in one forward
//! pass per decision. A model is specialized to one `(actions, outcomes)`
//! shape; once folding shrinks the matrix past that shape, callers fall back
//! to the vertex objective.
//!
//! Training minimizes a relative mean-square error so that matrices with
//! small objective scales (near-duplicate columns) still contribute useful
//! signal, with a floor on the denominator to keep exact duplicates finite.

use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::LossMatrix;
use crate::nn::{Gradients, Mlp};
use crate::objective::{
    find_best_fold, integral_objective_matrix, pair_count, Objective, ObjectiveMatrix,
};
use crate::seed::{rng_from_seed, substream};
use crate::simplex::SetExtension;

/// Hidden architecture shared by all surrogate models.
pub const HIDDEN_LAYERS: [usize; 4] = [64, 64, 64, 64];

/// Supervision pairs for one matrix shape: flattened matrices in, Monte
/// Carlo objective entries out.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateDataset {
    pub action_count: usize,
    pub outcome_count: usize,
    pub mc_particles: usize,
    pub seed: u64,
    pub inputs: Vec<Vec<f64>>,
    pub targets: Vec<Vec<f64>>,
}

impl SurrogateDataset {
    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    /// Split into train / validation / test by shuffled index, 80/10/10.
    pub fn split(&self, seed: u64) -> (SurrogateDataset, SurrogateDataset, SurrogateDataset) {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.shuffle(&mut rng_from_seed(substream(seed, 0x51)));
        let n = self.len();
        let n_test = n / 10;
        let n_val = n / 10;
        let n_train = n - n_val - n_test;
        let take = |range: &[usize]| SurrogateDataset {
            action_count: self.action_count,
            outcome_count: self.outcome_count,
            mc_particles: self.mc_particles,
            seed: self.seed,
            inputs: range.iter().map(|&i| self.inputs[i].clone()).collect(),
            targets: range.iter().map(|&i| self.targets[i].clone()).collect(),
        };
        (
            take(&order[..n_train]),
            take(&order[n_train..n_train + n_val]),
            take(&order[n_train + n_val..]),
        )
    }

    /// Binary array container: magic, shape header, then little-endian
    /// `f64` payloads. Round-trips exactly.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"OSD1");
        for v in [
            self.action_count as u64,
            self.outcome_count as u64,
            self.mc_particles as u64,
            self.seed,
            self.len() as u64,
        ] {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        for row in self.inputs.iter().chain(self.targets.iter()) {
            for &x in row {
                bytes.extend_from_slice(&x.to_le_bytes());
            }
        }
        std::fs::write(path, bytes)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        let fail = |msg: &str| Error::Parse {
            line: 1,
            column: 1,
            message: format!("{msg} in {}", path.display()),
        };
        if bytes.len() < 44 || &bytes[..4] != b"OSD1" {
            return Err(fail("not a surrogate dataset file"));
        }
        let mut at = 4;
        let mut read_u64 = |bytes: &[u8]| {
            let v = u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap());
            at += 8;
            v
        };
        let action_count = read_u64(&bytes) as usize;
        let outcome_count = read_u64(&bytes) as usize;
        let mc_particles = read_u64(&bytes) as usize;
        let seed = read_u64(&bytes);
        let examples = read_u64(&bytes) as usize;
        let in_dim = action_count * outcome_count;
        let out_dim = pair_count(outcome_count);
        let expected = 44 + 8 * examples * (in_dim + out_dim);
        if bytes.len() != expected {
            return Err(fail("truncated surrogate dataset file"));
        }
        let mut floats = bytes[44..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let mut read_rows = |rows: usize, cols: usize| -> Vec<Vec<f64>> {
            (0..rows)
                .map(|_| (0..cols).map(|_| floats.next().unwrap()).collect())
                .collect()
        };
        let inputs = read_rows(examples, in_dim);
        let targets = read_rows(examples, out_dim);
        Ok(Self {
            action_count,
            outcome_count,
            mc_particles,
            seed,
            inputs,
            targets,
        })
    }
}

/// Draw `example_count` matrices with entries uniform on `[0, 1)` and label
/// each with its Monte Carlo objective matrix (worst-case extension,
/// `mc_particles` samples shared across that example's pairs). Examples are
/// generated on independent substreams, so the result is identical under
/// any parallel schedule.
pub fn generate_surrogate_dataset(
    action_count: usize,
    outcome_count: usize,
    example_count: usize,
    mc_particles: usize,
    seed: u64,
) -> Result<SurrogateDataset> {
    if example_count == 0 {
        return Err(Error::InvalidArgument("example count must be >= 1".into()));
    }
    if outcome_count < 2 || action_count == 0 {
        return Err(Error::InvalidArgument(
            "need at least one action and two outcomes".into(),
        ));
    }
    let rows: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..example_count)
        .into_par_iter()
        .map(|k| {
            let example_seed = substream(seed, k as u64);
            let mut rng = rng_from_seed(substream(example_seed, 0));
            let flat: Vec<f64> = (0..action_count * outcome_count)
                .map(|_| rng.random::<f64>())
                .collect();
            let loss = LossMatrix::from_flat(action_count, outcome_count, flat.clone())?;
            let matrix = integral_objective_matrix(
                &loss,
                mc_particles,
                substream(example_seed, 1),
                SetExtension::WorstCase,
            )?;
            Ok((flat, matrix.upper_entries()))
        })
        .collect();

    let mut inputs = Vec::with_capacity(example_count);
    let mut targets = Vec::with_capacity(example_count);
    for row in rows {
        let (input, target) = row?;
        debug_assert!(target.iter().all(|&t| t >= -1e-9));
        inputs.push(input);
        targets.push(target);
    }
    Ok(SurrogateDataset {
        action_count,
        outcome_count,
        mc_particles,
        seed,
        inputs,
        targets,
    })
}

/// Optimizer and loss settings; the architecture itself is fixed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    /// Per-epoch multiplicative learning-rate decay.
    pub lr_decay: f64,
    /// Floor for the relative-error denominator `max(|target|^2, floor)`.
    pub relative_floor: f64,
    /// Cap on the global gradient norm per batch; the relative loss can
    /// weight a near-zero-norm target by 1/floor, and one such example
    /// would otherwise wipe out the fit. 0 disables clipping.
    pub gradient_clip: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 500,
            batch_size: 64,
            learning_rate: 3e-3,
            momentum: 0.9,
            lr_decay: 0.995,
            relative_floor: 1e-8,
            gradient_clip: 5.0,
        }
    }
}

/// Provenance and hyperparameters carried inside a saved model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub seed: u64,
    pub config: TrainConfig,
    pub final_train_loss: f64,
    pub final_val_loss: Option<f64>,
}

/// A trained per-shape regressor from loss matrices to objective entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateModel {
    pub action_count: usize,
    pub outcome_count: usize,
    pub mlp: Mlp,
    pub meta: TrainMeta,
}

impl SurrogateModel {
    pub fn matches_shape(&self, loss: &LossMatrix) -> bool {
        loss.action_count() == self.action_count
            && loss.outcome_count() == self.outcome_count
    }

    /// Predict all pair scores in one forward pass.
    pub fn objective_matrix(&self, loss: &LossMatrix) -> Result<ObjectiveMatrix> {
        if !self.matches_shape(loss) {
            return Err(Error::ShapeMismatch(format!(
                "model trained for {} x {}, matrix is {} x {}",
                self.action_count,
                self.outcome_count,
                loss.action_count(),
                loss.outcome_count()
            )));
        }
        let out = self.mlp.forward(loss.as_flat())?;
        ObjectiveMatrix::from_upper_entries(self.outcome_count, &out)
    }

    /// Versioned JSON weight dump; `f64` values survive the round trip
    /// exactly.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = ModelFile {
            schema: 1,
            model: self.clone(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if file.schema != 1 {
            return Err(Error::Parse {
                line: 1,
                column: 1,
                message: format!("unsupported model schema {}", file.schema),
            });
        }
        let model = file.model;
        let expected_out = pair_count(model.outcome_count);
        if model.mlp.output_size() != expected_out
            || model.mlp.input_size() != model.action_count * model.outcome_count
        {
            return Err(Error::ShapeMismatch(
                "model layer sizes disagree with its declared shape".into(),
            ));
        }
        Ok(model)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema: u32,
    model: SurrogateModel,
}

/// Loss curves and health flags from one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub train_losses: Vec<f64>,
    pub val_losses: Vec<f64>,
    /// Whether the 10-epoch moving average of the training loss never rose.
    pub smoothed_monotone: bool,
}

/// Train a fresh model on `train`, tracking `val` when given.
///
/// Deterministic for fixed inputs and seed: initialization, shuffling, and
/// the update order are all driven by the seed, single-threaded.
pub fn train_surrogate(
    train: &SurrogateDataset,
    val: Option<&SurrogateDataset>,
    cfg: &TrainConfig,
    seed: u64,
) -> Result<(SurrogateModel, TrainReport)> {
    if train.is_empty() {
        return Err(Error::InvalidArgument("empty training set".into()));
    }
    let in_dim = train.action_count * train.outcome_count;
    let out_dim = pair_count(train.outcome_count);
    for (k, (x, t)) in train.inputs.iter().zip(&train.targets).enumerate() {
        if x.len() != in_dim || t.len() != out_dim {
            return Err(Error::ShapeMismatch(format!(
                "example {k}: input {} / target {} for shape {in_dim} / {out_dim}",
                x.len(),
                t.len()
            )));
        }
    }

    let mut sizes = vec![in_dim];
    sizes.extend_from_slice(&HIDDEN_LAYERS);
    sizes.push(out_dim);
    let mut mlp = Mlp::new(&sizes, substream(seed, 1))?;
    let mut velocity = Gradients::zeros_like(&mlp);
    let mut shuffle_rng = rng_from_seed(substream(seed, 2));

    let mut train_losses = Vec::with_capacity(cfg.epochs);
    let mut val_losses = Vec::with_capacity(cfg.epochs);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut lr = cfg.learning_rate;

    for epoch in 0..cfg.epochs {
        order.shuffle(&mut shuffle_rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size.max(1)) {
            let mut grads = Gradients::zeros_like(&mlp);
            for &k in batch {
                let input = &train.inputs[k];
                let target = &train.targets[k];
                let cache = mlp.forward_cached(input)?;
                let denom = target
                    .iter()
                    .map(|t| t * t)
                    .sum::<f64>()
                    .max(cfg.relative_floor);
                let output = cache.output();
                let mut grad_out = Vec::with_capacity(out_dim);
                let mut example_loss = 0.0;
                for (y, t) in output.iter().zip(target) {
                    let diff = y - t;
                    example_loss += diff * diff;
                    grad_out.push(2.0 * diff / denom);
                }
                epoch_loss += example_loss / denom;
                mlp.backward(input, &cache, &grad_out, &mut grads)?;
            }
            grads.scale(1.0 / batch.len() as f64);
            if cfg.gradient_clip > 0.0 {
                let norm = grads.global_norm();
                if norm > cfg.gradient_clip {
                    grads.scale(cfg.gradient_clip / norm);
                }
            }
            mlp.apply_gradients(&grads, &mut velocity, lr, cfg.momentum);
        }
        epoch_loss /= train.len() as f64;
        if !epoch_loss.is_finite() {
            return Err(Error::Divergence(format!(
                "training loss became {epoch_loss} at epoch {epoch} (lr {lr})"
            )));
        }
        train_losses.push(epoch_loss);
        if let Some(v) = val {
            val_losses.push(relative_mse(&mlp, v, cfg.relative_floor)?);
        }
        lr *= cfg.lr_decay;
    }

    let smoothed_monotone = moving_average_monotone(&train_losses, 10);
    let model = SurrogateModel {
        action_count: train.action_count,
        outcome_count: train.outcome_count,
        mlp,
        meta: TrainMeta {
            seed,
            config: cfg.clone(),
            final_train_loss: *train_losses.last().expect("epochs >= 1"),
            final_val_loss: val_losses.last().copied(),
        },
    };
    Ok((
        model,
        TrainReport {
            train_losses,
            val_losses,
            smoothed_monotone,
        },
    ))
}

/// Mean relative squared error of a model over a dataset.
pub fn relative_mse(mlp: &Mlp, data: &SurrogateDataset, floor: f64) -> Result<f64> {
    let mut total = 0.0;
    for (input, target) in data.inputs.iter().zip(&data.targets) {
        let output = mlp.forward(input)?;
        let denom = target.iter().map(|t| t * t).sum::<f64>().max(floor);
        let sq: f64 = output
            .iter()
            .zip(target)
            .map(|(y, t)| (y - t) * (y - t))
            .sum();
        total += sq / denom;
    }
    Ok(total / data.len() as f64)
}

/// Held-out quality of a model: error against the Monte Carlo targets and
/// how often the predicted argmin pair matches theirs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub examples: usize,
    pub rmse: f64,
    pub argmin_accuracy: f64,
}

pub fn evaluate_surrogate(model: &SurrogateModel, test: &SurrogateDataset) -> Result<EvalReport> {
    if test.is_empty() {
        return Err(Error::InvalidArgument("empty evaluation set".into()));
    }
    let dim = model.outcome_count;
    let mut sq_sum = 0.0;
    let mut entries = 0usize;
    let mut hits = 0usize;
    for (input, target) in test.inputs.iter().zip(&test.targets) {
        let predicted = model.mlp.forward(input)?;
        for (y, t) in predicted.iter().zip(target) {
            sq_sum += (y - t) * (y - t);
            entries += 1;
        }
        let pred_matrix = ObjectiveMatrix::from_upper_entries(dim, &predicted)?;
        let true_matrix = ObjectiveMatrix::from_upper_entries(dim, target)?;
        if pred_matrix.argmin() == true_matrix.argmin() {
            hits += 1;
        }
    }
    Ok(EvalReport {
        examples: test.len(),
        rmse: (sq_sum / entries as f64).sqrt(),
        argmin_accuracy: hits as f64 / test.len() as f64,
    })
}

/// A fold-selection method being timed.
#[derive(Debug, Clone)]
pub enum LatencyMethod {
    Integral { samples: usize },
    Vertex,
    Surrogate(std::sync::Arc<SurrogateModel>),
}

impl LatencyMethod {
    pub fn label(&self) -> String {
        match self {
            LatencyMethod::Integral { samples } => format!("integral({samples})"),
            LatencyMethod::Vertex => "vertex".into(),
            LatencyMethod::Surrogate(_) => "surrogate".into(),
        }
    }
}

/// One row of the latency table.
#[derive(Debug, Clone, Serialize)]
pub struct LatencyRow {
    pub method: String,
    pub action_count: usize,
    pub outcome_count: usize,
    pub repeats: usize,
    pub median_seconds: f64,
}

/// Median wall-clock time of a single fold decision per method, over fresh
/// random matrices.
pub fn bench_fold_latency(
    action_count: usize,
    outcome_count: usize,
    methods: &[LatencyMethod],
    repeats: usize,
    seed: u64,
) -> Result<Vec<LatencyRow>> {
    if repeats == 0 {
        return Err(Error::InvalidArgument("repeats must be >= 1".into()));
    }
    let matrices: Vec<LossMatrix> = (0..repeats)
        .map(|k| {
            let mut rng = rng_from_seed(substream(seed, k as u64));
            let flat = (0..action_count * outcome_count)
                .map(|_| rng.random::<f64>())
                .collect();
            LossMatrix::from_flat(action_count, outcome_count, flat)
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(methods.len());
    for method in methods {
        let objective = match method {
            LatencyMethod::Integral { samples } => Objective::Integral { samples: *samples },
            LatencyMethod::Vertex => Objective::Vertex,
            LatencyMethod::Surrogate(model) => Objective::Surrogate(model.clone()),
        };
        let mut times = Vec::with_capacity(repeats);
        for (k, loss) in matrices.iter().enumerate() {
            let started = Instant::now();
            let (fold, _) =
                find_best_fold(loss, &objective, SetExtension::WorstCase, substream(seed, k as u64))?;
            let elapsed = started.elapsed().as_secs_f64();
            std::hint::black_box(fold);
            times.push(elapsed);
        }
        times.sort_by(|a, b| a.total_cmp(b));
        let median = if repeats % 2 == 1 {
            times[repeats / 2]
        } else {
            0.5 * (times[repeats / 2 - 1] + times[repeats / 2])
        };
        rows.push(LatencyRow {
            method: method.label(),
            action_count,
            outcome_count,
            repeats,
            median_seconds: median,
        });
    }
    Ok(rows)
}

fn moving_average_monotone(losses: &[f64], window: usize) -> bool {
    if losses.len() <= window {
        return true;
    }
    let averages: Vec<f64> = losses
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect();
    // Plateau jitter of a few percent is normal for SGD with momentum;
    // only a clear upward drift counts as non-monotone.
    averages
        .windows(2)
        .all(|w| w[1] <= w[0] * 1.05 + 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_dataset() -> SurrogateDataset {
        generate_surrogate_dataset(2, 3, 64, 50, 11).unwrap()
    }

    #[test]
    fn dataset_shapes_and_targets() {
        let data = tiny_dataset();
        assert_eq!(data.len(), 64);
        assert_eq!(data.inputs[0].len(), 6);
        assert_eq!(data.targets[0].len(), 3);
        for row in &data.targets {
            for &t in row {
                assert!(t >= -1e-9);
            }
        }
    }

    #[test]
    fn dataset_generation_is_deterministic() {
        let a = generate_surrogate_dataset(2, 3, 16, 40, 5).unwrap();
        let b = generate_surrogate_dataset(2, 3, 16, 40, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn duplicate_column_canary_has_zero_target() {
        // Inject a matrix with identical columns 0 and 1 and label it the
        // same way the generator does: its (0,1) target must be exactly 0.
        let loss =
            LossMatrix::from_rows(vec![vec![0.3, 0.3, 0.9], vec![0.7, 0.7, 0.2]]).unwrap();
        let m = integral_objective_matrix(&loss, 1000, 3, SetExtension::WorstCase).unwrap();
        assert!(m.get(0, 1).abs() < 1e-15);
    }

    #[test]
    fn dataset_round_trips_through_binary_file() {
        let data = tiny_dataset();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("data.osd");
        data.save(&path).unwrap();
        let back = SurrogateDataset::load(&path).unwrap();
        assert_eq!(data, back);
    }

    #[test]
    fn memorizes_a_single_repeated_example() {
        let base = tiny_dataset();
        let data = SurrogateDataset {
            inputs: vec![base.inputs[0].clone(); 32],
            targets: vec![base.targets[0].clone(); 32],
            ..base
        };
        let cfg = TrainConfig {
            epochs: 300,
            batch_size: 32,
            learning_rate: 3e-3,
            ..TrainConfig::default()
        };
        let (_, report) = train_surrogate(&data, None, &cfg, 1).unwrap();
        let final_loss = *report.train_losses.last().unwrap();
        assert!(final_loss < 1e-4, "final loss {final_loss}");
    }

    #[test]
    fn training_is_deterministic() {
        let data = tiny_dataset();
        let cfg = TrainConfig {
            epochs: 5,
            ..TrainConfig::default()
        };
        let (a, _) = train_surrogate(&data, None, &cfg, 9).unwrap();
        let (b, _) = train_surrogate(&data, None, &cfg, 9).unwrap();
        assert_eq!(a.mlp, b.mlp);
    }

    #[test]
    fn predicted_matrix_has_the_right_shape() {
        let data = tiny_dataset();
        let cfg = TrainConfig {
            epochs: 3,
            ..TrainConfig::default()
        };
        let (model, _) = train_surrogate(&data, None, &cfg, 2).unwrap();
        let loss = LossMatrix::from_flat(2, 3, data.inputs[0].clone()).unwrap();
        let m = model.objective_matrix(&loss).unwrap();
        assert_eq!(m.upper_entries().len(), 3);
        let (i, j) = m.argmin();
        assert!(i < j && j < 3);

        let wrong = LossMatrix::from_rows(vec![vec![0.1, 0.2]]).unwrap();
        assert!(model.objective_matrix(&wrong).is_err());
        assert!(!model.matches_shape(&wrong));
    }

    #[test]
    fn model_round_trips_through_json() {
        let data = tiny_dataset();
        let cfg = TrainConfig {
            epochs: 2,
            ..TrainConfig::default()
        };
        let (model, _) = train_surrogate(&data, None, &cfg, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        let back = SurrogateModel::load(&path).unwrap();
        assert_eq!(model, back);
    }

    #[test]
    fn split_fractions_are_80_10_10() {
        let data = generate_surrogate_dataset(2, 3, 100, 20, 7).unwrap();
        let (train, val, test) = data.split(3);
        assert_eq!(train.len(), 80);
        assert_eq!(val.len(), 10);
        assert_eq!(test.len(), 10);
    }

    #[test]
    fn latency_rows_cover_all_methods() {
        let rows = bench_fold_latency(
            2,
            3,
            &[LatencyMethod::Vertex, LatencyMethod::Integral { samples: 50 }],
            5,
            1,
        )
        .unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.median_seconds >= 0.0));
    }

    #[test]
    fn integral_latency_grows_with_the_outcome_count() {
        // 28 pairs vs 3 pairs at the same sample count; the margin is wide
        // enough to survive a noisy machine.
        let methods = [LatencyMethod::Integral { samples: 500 }];
        let small = bench_fold_latency(2, 3, &methods, 9, 2).unwrap()[0].median_seconds;
        let large = bench_fold_latency(2, 8, &methods, 9, 2).unwrap()[0].median_seconds;
        assert!(
            large > small,
            "integral latency should grow with outcomes: {small:.2e}s vs {large:.2e}s"
        );
    }
}
