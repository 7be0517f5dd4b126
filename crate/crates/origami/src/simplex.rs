//! Points of the probability simplex and the fold operation.
//!
//! A [`ProbVector`] is a distribution over `C` outcomes: nonnegative entries
//! summing to one. A [`Fold`] merges two outcomes, mapping the simplex over
//! `C` outcomes onto the simplex over `C - 1`: the source entry is removed
//! and its mass is added to the target entry. Folding is the only projection
//! used in this crate; it keeps a clean reading of the result (the merged
//! coordinate is the probability that either outcome occurs) and lets the
//! loss matrix be updated in `O(actions)` per fold.

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{rng_from_seed, substream};

/// Inputs whose mass drifts from 1 by more than this are rejected.
pub const MASS_DRIFT_TOLERANCE: f64 = 1e-6;

/// Tolerance used when *checking* simplex membership of values produced by
/// arithmetic inside the crate.
pub const MASS_CHECK_TOLERANCE: f64 = 1e-9;

/// A point of the probability simplex.
///
/// Construction normalizes exact rounding drift away; inputs further than
/// [`MASS_DRIFT_TOLERANCE`] from unit mass are rejected rather than silently
/// rescaled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbVector {
    entries: Vec<f64>,
}

impl ProbVector {
    /// Validate and normalize a raw vector of probabilities.
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidProbVector("empty vector".into()));
        }
        let mut entries = entries;
        for (i, x) in entries.iter_mut().enumerate() {
            if !x.is_finite() {
                return Err(Error::InvalidProbVector(format!(
                    "non-finite entry {x} at index {i}"
                )));
            }
            if *x < 0.0 {
                if *x < -MASS_CHECK_TOLERANCE {
                    return Err(Error::InvalidProbVector(format!(
                        "negative entry {x} at index {i}"
                    )));
                }
                *x = 0.0;
            }
        }
        let sum: f64 = entries.iter().sum();
        if (sum - 1.0).abs() > MASS_DRIFT_TOLERANCE {
            return Err(Error::InvalidProbVector(format!(
                "entries sum to {sum}, outside 1 +/- {MASS_DRIFT_TOLERANCE}"
            )));
        }
        if sum != 1.0 {
            for x in entries.iter_mut() {
                *x /= sum;
            }
        }
        Ok(Self { entries })
    }

    /// The uniform distribution over `dim` outcomes.
    pub fn uniform(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidProbVector("dimension must be >= 1".into()));
        }
        Ok(Self {
            entries: vec![1.0 / dim as f64; dim],
        })
    }

    /// The vertex `e_index` of the simplex: all mass on one outcome.
    pub fn one_hot(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut entries = vec![0.0; dim];
        entries[index] = 1.0;
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, index: usize) -> Option<f64> {
        self.entries.get(index).copied()
    }

    /// Merge two outcomes: remove the source entry and add its mass to the
    /// target entry, preserving the order of the remaining entries.
    pub fn fold(&self, fold: Fold) -> Result<ProbVector> {
        fold.check_dim(self.dim())?;
        let mut out = Vec::with_capacity(self.dim() - 1);
        for (k, &x) in self.entries.iter().enumerate() {
            if k == fold.source() {
                continue;
            }
            if k == fold.target() {
                out.push(x + self.entries[fold.source()]);
            } else {
                out.push(x);
            }
        }
        Ok(ProbVector { entries: out })
    }

    /// Total mass; equals 1 up to accumulated floating-point error.
    pub fn mass(&self) -> f64 {
        self.entries.iter().sum()
    }
}

impl AsRef<[f64]> for ProbVector {
    fn as_ref(&self) -> &[f64] {
        &self.entries
    }
}

/// The projection `f_{source -> target}` merging two outcomes.
///
/// Applying a fold to a vector of dimension `C` yields dimension `C - 1`:
/// index `source` is removed, its mass lands on `target`, and every other
/// index keeps its relative order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    source: usize,
    target: usize,
}

impl Fold {
    pub fn new(source: usize, target: usize) -> Result<Self> {
        if source == target {
            return Err(Error::FoldSourceEqualsTarget(source));
        }
        Ok(Self { source, target })
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Verify both indices address a vector of dimension `dim`.
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        for index in [self.source, self.target] {
            if index >= dim {
                return Err(Error::IndexOutOfRange { index, dim });
            }
        }
        Ok(())
    }

    /// Where an old index lands after the fold; `None` for the source index,
    /// which no longer exists on its own.
    pub fn relabel(&self, old_index: usize) -> Option<usize> {
        if old_index == self.source {
            None
        } else if old_index > self.source {
            Some(old_index - 1)
        } else {
            Some(old_index)
        }
    }

    /// Index of the merged entry in the folded vector.
    pub fn merged_index(&self) -> usize {
        self.relabel(self.target).expect("target != source")
    }
}

impl std::fmt::Display for Fold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

/// How a loss defined on single outcomes extends to merged outcome sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetExtension {
    /// Max over the set's members: the merged outcome costs as much as its
    /// worst member. Folding under this extension can only raise the
    /// decision value.
    WorstCase,
    /// Probability-weighted mean of the members' losses. Requires the
    /// distribution being folded; preserves the decision value exactly.
    WeightedSum,
    /// Sum over members. Penalizes large sets: a member's cost is charged
    /// whether or not it occurs.
    Sum,
}

impl SetExtension {
    /// Whether applying this extension needs the probability vector being
    /// folded.
    pub fn needs_weights(&self) -> bool {
        matches!(self, SetExtension::WeightedSum)
    }
}

impl std::fmt::Display for SetExtension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SetExtension::WorstCase => write!(f, "worst-case"),
            SetExtension::WeightedSum => write!(f, "weighted-sum"),
            SetExtension::Sum => write!(f, "sum"),
        }
    }
}

/// Draw `count` points uniformly from the simplex over `dim` outcomes.
///
/// Unit-rate exponential draws normalized to unit mass: the exact flat
/// Dirichlet. Deterministic for a given seed.
pub fn sample_simplex(count: usize, dim: usize, seed: u64) -> Result<Vec<ProbVector>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be >= 1".into()));
    }
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let mut rng = rng_from_seed(substream(seed, 0));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut entries = vec![0.0; dim];
        let mut total = 0.0;
        for x in entries.iter_mut() {
            // -ln(1 - u) with u in [0, 1): strictly positive, finite.
            let u: f64 = rng.random();
            let e = -(1.0 - u).ln();
            *x = e;
            total += e;
        }
        for x in entries.iter_mut() {
            *x /= total;
        }
        out.push(ProbVector { entries });
    }
    Ok(out)
}
