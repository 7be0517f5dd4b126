//! Multinomial logistic models for the benchmark pipelines.
//!
//! Deliberately small: a single softmax layer over raw context features
//! stands in for whatever upstream model a deployment would use. The point
//! under test is the output-space abstraction, not the architecture.

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;
use crate::simplex::ProbVector;

use super::world::softmax;

/// Optimizer settings for the logistic trainers.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PredictorConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub l2: f64,
    /// Weight examples inversely to their class frequency, so a deliberately
    /// skewed acquisition pool does not drown the rare classes.
    pub class_balanced: bool,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        Self {
            epochs: 120,
            batch_size: 32,
            learning_rate: 0.3,
            l2: 1e-3,
            class_balanced: false,
        }
    }
}

/// A trained softmax model: `class_count x (feature_dim + 1)` weights, bias
/// in the last column.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularPredictor {
    pub class_count: usize,
    pub feature_dim: usize,
    weights: Vec<f64>,
}

impl TabularPredictor {
    fn zeros(class_count: usize, feature_dim: usize) -> Self {
        Self {
            class_count,
            feature_dim,
            weights: vec![0.0; class_count * (feature_dim + 1)],
        }
    }

    fn scores(&self, features: &[f64]) -> Vec<f64> {
        let width = self.feature_dim + 1;
        (0..self.class_count)
            .map(|c| {
                let row = &self.weights[c * width..(c + 1) * width];
                row[..self.feature_dim]
                    .iter()
                    .zip(features)
                    .map(|(w, x)| w * x)
                    .sum::<f64>()
                    + row[self.feature_dim]
            })
            .collect()
    }

    /// Class probabilities for a context.
    pub fn probabilities(&self, features: &[f64]) -> Result<ProbVector> {
        if features.len() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                context: "predictor features",
                expected: self.feature_dim,
                actual: features.len(),
            });
        }
        softmax(&self.scores(features))
    }

    /// Most probable class, smallest index on ties.
    pub fn predict(&self, features: &[f64]) -> Result<usize> {
        let p = self.probabilities(features)?;
        let mut best = f64::NEG_INFINITY;
        let mut arg = 0;
        for (k, &v) in p.entries().iter().enumerate() {
            if v > best {
                best = v;
                arg = k;
            }
        }
        Ok(arg)
    }

    /// Top-1 accuracy over a labeled set.
    pub fn accuracy(&self, contexts: &[Vec<f64>], labels: &[usize]) -> Result<f64> {
        let mut hits = 0usize;
        for (x, &y) in contexts.iter().zip(labels) {
            if self.predict(x)? == y {
                hits += 1;
            }
        }
        Ok(hits as f64 / labels.len().max(1) as f64)
    }
}

/// Fit a softmax classifier by cross-entropy with L2 shrinkage.
pub fn train_classifier(
    class_count: usize,
    contexts: &[Vec<f64>],
    labels: &[usize],
    cfg: &PredictorConfig,
    seed: u64,
) -> Result<TabularPredictor> {
    check_training_data(class_count, contexts, labels)?;
    let feature_dim = contexts[0].len();
    let mut model = TabularPredictor::zeros(class_count, feature_dim);
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..labels.len()).collect();
    let width = feature_dim + 1;

    let example_weights: Vec<f64> = if cfg.class_balanced {
        let mut counts = vec![0usize; class_count];
        for &y in labels {
            counts[y] += 1;
        }
        let mean = labels.len() as f64 / counts.iter().filter(|&&n| n > 0).count() as f64;
        labels
            .iter()
            .map(|&y| mean / counts[y].max(1) as f64)
            .collect()
    } else {
        vec![1.0; labels.len()]
    };

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size.max(1)) {
            let mut grad = vec![0.0; model.weights.len()];
            for &k in batch {
                let p = model.probabilities(&contexts[k])?;
                for c in 0..class_count {
                    let d = example_weights[k]
                        * (p.entries()[c] - if c == labels[k] { 1.0 } else { 0.0 });
                    let row = &mut grad[c * width..(c + 1) * width];
                    for (g, &x) in row[..feature_dim].iter_mut().zip(&contexts[k]) {
                        *g += d * x;
                    }
                    row[feature_dim] += d;
                }
            }
            let scale = cfg.learning_rate / batch.len() as f64;
            for (w, g) in model.weights.iter_mut().zip(&grad) {
                *w -= scale * g + cfg.learning_rate * cfg.l2 * *w;
            }
        }
    }
    Ok(model)
}

/// Fit a softmax policy that directly minimizes the expected decision loss
/// `sum_a pi(a | x) loss(z, a)` of its own action distribution.
pub fn train_policy(
    action_count: usize,
    contexts: &[Vec<f64>],
    per_action_losses: &[Vec<f64>],
    cfg: &PredictorConfig,
    seed: u64,
) -> Result<TabularPredictor> {
    if contexts.is_empty() || contexts.len() != per_action_losses.len() {
        return Err(Error::InvalidArgument(
            "contexts and per-action losses must align".into(),
        ));
    }
    if per_action_losses.iter().any(|l| l.len() != action_count) {
        return Err(Error::InvalidArgument(
            "each example needs one loss per action".into(),
        ));
    }
    let feature_dim = contexts[0].len();
    let mut model = TabularPredictor::zeros(action_count, feature_dim);
    let mut rng = rng_from_seed(seed);
    let mut order: Vec<usize> = (0..contexts.len()).collect();
    let width = feature_dim + 1;

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size.max(1)) {
            let mut grad = vec![0.0; model.weights.len()];
            for &k in batch {
                let pi = model.probabilities(&contexts[k])?;
                let losses = &per_action_losses[k];
                let expected: f64 = pi
                    .entries()
                    .iter()
                    .zip(losses)
                    .map(|(p, l)| p * l)
                    .sum();
                for a in 0..action_count {
                    // d E[loss] / d score_a for a softmax policy.
                    let d = pi.entries()[a] * (losses[a] - expected);
                    let row = &mut grad[a * width..(a + 1) * width];
                    for (g, &x) in row[..feature_dim].iter_mut().zip(&contexts[k]) {
                        *g += d * x;
                    }
                    row[feature_dim] += d;
                }
            }
            let scale = cfg.learning_rate / batch.len() as f64;
            for (w, g) in model.weights.iter_mut().zip(&grad) {
                *w -= scale * g + cfg.learning_rate * cfg.l2 * *w;
            }
        }
    }
    Ok(model)
}

fn check_training_data(
    class_count: usize,
    contexts: &[Vec<f64>],
    labels: &[usize],
) -> Result<()> {
    if contexts.is_empty() || contexts.len() != labels.len() {
        return Err(Error::InvalidArgument(
            "contexts and labels must align and be nonempty".into(),
        ));
    }
    let dim = contexts[0].len();
    if contexts.iter().any(|x| x.len() != dim) {
        return Err(Error::InvalidArgument("ragged context features".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= class_count) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            dim: class_count,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn separable_data() -> (Vec<Vec<f64>>, Vec<usize>) {
        // Three linearly separable blobs.
        let mut contexts = Vec::new();
        let mut labels = Vec::new();
        for k in 0..60 {
            let wiggle = 0.1 * ((k % 7) as f64 - 3.0) / 3.0;
            let (x, y, label) = match k % 3 {
                0 => (1.0 + wiggle, 0.0, 0),
                1 => (-0.5, 1.0 + wiggle, 1),
                _ => (-0.5 + wiggle, -1.0, 2),
            };
            contexts.push(vec![x, y]);
            labels.push(label);
        }
        (contexts, labels)
    }

    #[test]
    fn classifier_fits_separable_blobs() {
        let (contexts, labels) = separable_data();
        let model =
            train_classifier(3, &contexts, &labels, &PredictorConfig::default(), 1).unwrap();
        let acc = model.accuracy(&contexts, &labels).unwrap();
        assert!(acc > 0.95, "accuracy {acc}");
    }

    #[test]
    fn training_is_deterministic() {
        let (contexts, labels) = separable_data();
        let cfg = PredictorConfig::default();
        let a = train_classifier(3, &contexts, &labels, &cfg, 5).unwrap();
        let b = train_classifier(3, &contexts, &labels, &cfg, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn policy_learns_to_avoid_costly_actions() {
        // Two contexts: in state A action 0 is free, in state B action 1 is.
        let mut contexts = Vec::new();
        let mut losses = Vec::new();
        for k in 0..40 {
            if k % 2 == 0 {
                contexts.push(vec![1.0, 0.0]);
                losses.push(vec![0.0, 1.0]);
            } else {
                contexts.push(vec![0.0, 1.0]);
                losses.push(vec![1.0, 0.0]);
            }
        }
        let model = train_policy(2, &contexts, &losses, &PredictorConfig::default(), 3).unwrap();
        assert_eq!(model.predict(&[1.0, 0.0]).unwrap(), 0);
        assert_eq!(model.predict(&[0.0, 1.0]).unwrap(), 1);
    }

    #[test]
    fn rejects_bad_labels() {
        let contexts = vec![vec![0.0, 1.0]];
        let labels = vec![5usize];
        assert!(train_classifier(3, &contexts, &labels, &PredictorConfig::default(), 0).is_err());
    }
}
