//! A seeded spatial decision world.
//!
//! Outcomes are the cells of a square grid. The terrain comes in a handful
//! of latent types — think valley forest, ridgeline, open grassland — laid
//! out as interleaved patches (each type claims the locations where its own
//! low-frequency random field wins). A type fixes the location's three
//! channels, slope / vegetation / wind exposure, up to small local jitter.
//! A context is a short weather vector; the conditional distribution of
//! where the next peak event lands is a softmax of how strongly the context
//! couples to each location's channels, so one weather pattern spreads its
//! risk over several patches of several types.
//!
//! Three response actions price out against the channels: ground response
//! costs more on steep terrain, air response costs more where wind exposure
//! is high, indirect response costs more in dense vegetation. Construction
//! keeps every entry in `[0, 1]` so the actions price on a comparable
//! scale. Because losses are (nearly) constant within a type, grouping
//! locations of a type together loses almost no decision information, while
//! the types' patchwork layout makes exact-location prediction much harder
//! than type prediction.
//!
//! Everything — fields, loss, contexts, labels — is a pure function of the
//! seeds, so per-seed benchmark comparisons pair exactly.

use rand::Rng as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::loss::LossMatrix;
use crate::seed::{rng_from_seed, substream, Rng};
use crate::simplex::ProbVector;

/// Channels per location; also the context dimension.
pub const CHANNELS: usize = 3;

/// Knobs for world generation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureConfig {
    /// Latent terrain types.
    pub terrain_types: usize,
    /// Per-location channel jitter around the type prototype.
    pub jitter: f64,
    /// Random sinusoids per type-assignment field.
    pub harmonics: usize,
    /// Largest spatial frequency, in cycles across the grid.
    pub max_frequency: f64,
    /// Inverse temperature of the event softmax; larger concentrates the
    /// conditional on fewer locations.
    pub sharpness: f64,
    /// Dimension of the observed weather context. The three risk factors
    /// are fixed random projections of it, so higher dimensions cost
    /// predictors more data for the same signal — the data-limited regime
    /// the folded pipelines are built for.
    pub context_dim: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            terrain_types: 7,
            jitter: 0.03,
            harmonics: 4,
            max_frequency: 2.0,
            sharpness: 6.0,
            context_dim: 8,
        }
    }
}

/// A fully materialized world.
#[derive(Debug, Clone)]
pub struct SyntheticWorld {
    pub grid_size: usize,
    /// `[slope, vegetation, wind]` per location, each channel in `[0, 1]`.
    pub features: Vec<[f64; CHANNELS]>,
    /// `3 x grid_size^2` decision loss derived from the channels.
    pub loss: LossMatrix,
    pub sharpness: f64,
    /// Row-major `CHANNELS x context_dim` projection from observed contexts
    /// to the channel couplings.
    coupling: Vec<f64>,
    pub context_dim: usize,
    pub seed: u64,
}

/// Build a world from a seed. Identical inputs give identical worlds.
pub fn build_synthetic_world(
    grid_size: usize,
    config: &FeatureConfig,
    seed: u64,
) -> Result<SyntheticWorld> {
    if grid_size < 2 {
        return Err(Error::InvalidArgument("grid size must be >= 2".into()));
    }
    if config.terrain_types == 0 {
        return Err(Error::InvalidArgument("need at least one terrain type".into()));
    }
    let c = grid_size * grid_size;

    // Patchwork type assignment: each type's smooth field competes per
    // location.
    let type_fields: Vec<Vec<f64>> = (0..config.terrain_types)
        .map(|t| smooth_field(grid_size, config, &mut rng_from_seed(substream(seed, t as u64))))
        .collect();
    let types: Vec<usize> = (0..c)
        .map(|loc| {
            (0..config.terrain_types)
                .max_by(|&a, &b| type_fields[a][loc].total_cmp(&type_fields[b][loc]))
                .expect("at least one type")
        })
        .collect();

    // Channel prototypes per type, spread over the unit cube.
    let mut proto_rng = rng_from_seed(substream(seed, 1000));
    let prototypes: Vec<[f64; CHANNELS]> = (0..config.terrain_types)
        .map(|_| {
            [
                proto_rng.random_range(0.05..0.95),
                proto_rng.random_range(0.05..0.95),
                proto_rng.random_range(0.05..0.95),
            ]
        })
        .collect();

    let mut jitter_rng = rng_from_seed(substream(seed, 1001));
    let mut features = vec![[0.0; CHANNELS]; c];
    for loc in 0..c {
        let proto = prototypes[types[loc]];
        for (channel, slot) in features[loc].iter_mut().enumerate() {
            *slot = (proto[channel] + config.jitter * standard_normal(&mut jitter_rng))
                .clamp(0.0, 1.0);
        }
    }

    // Action rows: ground pays for slope, air for wind (kept mid-range so
    // it wins exactly where neither terrain extreme does), indirect for
    // vegetation. All entries stay in [0, 1] by construction.
    let rows = vec![
        features.iter().map(|f| f[0]).collect::<Vec<f64>>(),
        features.iter().map(|f| 0.3 + 0.3 * f[2]).collect::<Vec<f64>>(),
        features.iter().map(|f| f[1]).collect::<Vec<f64>>(),
    ];

    if config.context_dim == 0 {
        return Err(Error::InvalidArgument("context dimension must be >= 1".into()));
    }
    let mut coupling_rng = rng_from_seed(substream(seed, 2));
    let norm = (config.context_dim as f64).sqrt();
    let coupling = (0..CHANNELS * config.context_dim)
        .map(|_| standard_normal(&mut coupling_rng) / norm)
        .collect();

    Ok(SyntheticWorld {
        grid_size,
        features,
        loss: LossMatrix::from_rows(rows)?,
        sharpness: config.sharpness,
        coupling,
        context_dim: config.context_dim,
        seed,
    })
}

fn smooth_field(grid_size: usize, config: &FeatureConfig, rng: &mut Rng) -> Vec<f64> {
    let g = grid_size as f64;
    let waves: Vec<(f64, f64, f64, f64)> = (0..config.harmonics.max(1))
        .map(|_| {
            (
                rng.random_range(0.5..1.0),
                rng.random_range(-config.max_frequency..config.max_frequency),
                rng.random_range(-config.max_frequency..config.max_frequency),
                rng.random_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    let mut field = Vec::with_capacity(grid_size * grid_size);
    for row in 0..grid_size {
        for col in 0..grid_size {
            let mut v = 0.0;
            for &(amp, u, w, phase) in &waves {
                v += amp
                    * (std::f64::consts::TAU * (u * row as f64 + w * col as f64) / g + phase)
                        .sin();
            }
            field.push(v);
        }
    }
    let lo = field.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = field.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1e-12);
    for v in field.iter_mut() {
        *v = (*v - lo) / span;
    }
    field
}

impl SyntheticWorld {
    pub fn outcome_count(&self) -> usize {
        self.grid_size * self.grid_size
    }

    /// The channel couplings induced by an observed context.
    pub fn channel_couplings(&self, context: &[f64]) -> Result<[f64; CHANNELS]> {
        if context.len() != self.context_dim {
            return Err(Error::DimensionMismatch {
                context: "weather context vs world context dimension",
                expected: self.context_dim,
                actual: context.len(),
            });
        }
        let mut out = [0.0; CHANNELS];
        for (c, slot) in out.iter_mut().enumerate() {
            *slot = self.coupling[c * self.context_dim..(c + 1) * self.context_dim]
                .iter()
                .zip(context)
                .map(|(m, x)| m * x)
                .sum();
        }
        Ok(out)
    }

    /// The true conditional over locations for a weather context.
    pub fn true_conditional(&self, context: &[f64]) -> Result<ProbVector> {
        let couplings = self.channel_couplings(context)?;
        let scores: Vec<f64> = self
            .features
            .iter()
            .map(|f| {
                self.sharpness
                    * f.iter()
                        .zip(&couplings)
                        .map(|(feat, w)| (feat - 0.5) * w)
                        .sum::<f64>()
            })
            .collect();
        softmax(&scores)
    }

    /// Draw `count` contexts and event locations.
    pub fn sample_dataset(&self, count: usize, seed: u64) -> Result<Dataset> {
        let mut rng = rng_from_seed(substream(seed, 9));
        let mut contexts = Vec::with_capacity(count);
        let mut labels = Vec::with_capacity(count);
        for _ in 0..count {
            let context: Vec<f64> = (0..self.context_dim)
                .map(|_| standard_normal(&mut rng))
                .collect();
            let conditional = self.true_conditional(&context)?;
            let label = sample_index(&conditional, &mut rng);
            contexts.push(context);
            labels.push(label);
        }
        Ok(Dataset { contexts, labels })
    }
}

/// Context/label pairs; callers split by prefix length so the same seed
/// always yields the same train/test rows.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub contexts: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// First `train` rows for fitting, the rest for evaluation.
    pub fn split_at(&self, train: usize) -> Result<(Dataset, Dataset)> {
        if train == 0 || train >= self.len() {
            return Err(Error::InvalidArgument(format!(
                "cannot split {} rows at {train}",
                self.len()
            )));
        }
        Ok((
            Dataset {
                contexts: self.contexts[..train].to_vec(),
                labels: self.labels[..train].to_vec(),
            },
            Dataset {
                contexts: self.contexts[train..].to_vec(),
                labels: self.labels[train..].to_vec(),
            },
        ))
    }
}

pub(crate) fn softmax(scores: &[f64]) -> Result<ProbVector> {
    let top = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - top).exp()).collect();
    let total: f64 = exps.iter().sum();
    ProbVector::new(exps.into_iter().map(|e| e / total).collect())
}

/// Inverse-CDF draw from a distribution.
pub(crate) fn sample_index(p: &ProbVector, rng: &mut Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &mass) in p.entries().iter().enumerate() {
        acc += mass;
        if u < acc {
            return k;
        }
    }
    p.dim() - 1
}

/// Box-Muller standard normal.
pub(crate) fn standard_normal(rng: &mut Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn world_is_deterministic() {
        let cfg = FeatureConfig::default();
        let a = build_synthetic_world(6, &cfg, 42).unwrap();
        let b = build_synthetic_world(6, &cfg, 42).unwrap();
        assert_eq!(a.features, b.features);
        assert_eq!(a.loss, b.loss);
        let c = build_synthetic_world(6, &cfg, 43).unwrap();
        assert_ne!(a.features, c.features);
    }

    #[test]
    fn losses_live_in_the_unit_interval() {
        let world = build_synthetic_world(8, &FeatureConfig::default(), 7).unwrap();
        for &x in world.loss.as_flat() {
            assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn steepest_locations_cost_ground_response_most() {
        let world = build_synthetic_world(10, &FeatureConfig::default(), 3).unwrap();
        let mut ground: Vec<f64> = world.loss.row(0).to_vec();
        ground.sort_by(|a, b| a.total_cmp(b));
        let median = ground[ground.len() / 2];
        let steepest = world
            .features
            .iter()
            .enumerate()
            .max_by(|a, b| a.1[0].total_cmp(&b.1[0]))
            .unwrap()
            .0;
        assert!(world.loss.entry(0, steepest) > median);
    }

    #[test]
    fn conditional_is_a_distribution() {
        let world = build_synthetic_world(5, &FeatureConfig::default(), 1).unwrap();
        let context = vec![0.4, -1.2, 0.3, 0.9, -0.2, 0.0, 1.4, -0.7];
        let p = world.true_conditional(&context).unwrap();
        assert_eq!(p.dim(), 25);
        assert!((p.mass() - 1.0).abs() < 1e-9);
        assert!(world.true_conditional(&[0.1, 0.2]).is_err());
    }

    #[test]
    fn datasets_are_seeded() {
        let world = build_synthetic_world(5, &FeatureConfig::default(), 1).unwrap();
        let a = world.sample_dataset(50, 9).unwrap();
        let b = world.sample_dataset(50, 9).unwrap();
        assert_eq!(a.labels, b.labels);
        assert_eq!(a.contexts, b.contexts);
        let c = world.sample_dataset(50, 10).unwrap();
        assert_ne!(a.labels, c.labels);
    }

    #[test]
    fn labels_follow_the_conditional() {
        // With a very peaked softmax, labels should concentrate where the
        // conditional does.
        let cfg = FeatureConfig {
            sharpness: 40.0,
            ..FeatureConfig::default()
        };
        let world = build_synthetic_world(4, &cfg, 11).unwrap();
        let data = world.sample_dataset(400, 2).unwrap();
        let mut hits = 0;
        for (context, &label) in data.contexts.iter().zip(&data.labels) {
            let p = world.true_conditional(context).unwrap();
            let mode = p
                .entries()
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            if mode == label {
                hits += 1;
            }
        }
        assert!(hits as f64 / 400.0 > 0.5, "only {hits} / 400 at the mode");
    }
}
