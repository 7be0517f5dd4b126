//! Fold-selection objectives.
//!
//! Each greedy step scores every unordered outcome pair `(i, j)` with the
//! cost of folding them together, writes the scores into the upper triangle
//! of an [`ObjectiveMatrix`], and picks the argmin. Three scores are
//! available, trading accuracy for compute:
//!
//! * [`integral_objective`] — the average H-entropy increase over the whole
//!   simplex, estimated by Monte Carlo on a shared sample set;
//! * the max-increase objective in [`crate::ccp`] — the worst-case increase
//!   over the simplex, a difference-of-concave program solved heuristically;
//! * [`vertex_objective`] — the H-entropy difference between the two merged
//!   vertices, exact for fully confident predictions and by far the
//!   cheapest.
//!
//! A trained [`SurrogateModel`](crate::surrogate::SurrogateModel) can stand
//! in for the integral objective, predicting the whole matrix in one forward
//! pass.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ccp::{ccp_max_increase, CcpConfig};
use crate::error::{Error, Result};
use crate::loss::LossMatrix;
use crate::seed::substream;
use crate::simplex::{sample_simplex, Fold, ProbVector, SetExtension};
use crate::surrogate::SurrogateModel;

/// Scores for every candidate fold of a `C`-outcome space.
///
/// Only the strict upper triangle is meaningful; the diagonal and lower
/// triangle hold an infinite sentinel that no argmin can select, so no
/// legitimate objective value, however large, collides with it.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveMatrix {
    dim: usize,
    entries: Vec<f64>,
}

impl ObjectiveMatrix {
    /// A `dim x dim` matrix of sentinels, ready to be filled.
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(
                "objective matrix needs at least two outcomes".into(),
            ));
        }
        Ok(Self {
            dim,
            entries: vec![f64::INFINITY; dim * dim],
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    /// Write the score of pair `(i, j)`, `i < j`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<()> {
        if i >= j || j >= self.dim {
            return Err(Error::InvalidArgument(format!(
                "({i}, {j}) is not an upper-triangular pair of a {0} x {0} matrix",
                self.dim
            )));
        }
        self.entries[i * self.dim + j] = value;
        Ok(())
    }

    /// The minimizing pair; ties resolve to the lexicographically smallest
    /// `(i, j)` so selection is deterministic.
    pub fn argmin(&self) -> (usize, usize) {
        let mut best = f64::INFINITY;
        let mut arg = (0, 1);
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let v = self.get(i, j);
                if v < best {
                    best = v;
                    arg = (i, j);
                }
            }
        }
        arg
    }

    /// Upper-triangular entries in row-major pair order, the order surrogate
    /// models emit.
    pub fn upper_entries(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(pair_count(self.dim));
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                out.push(self.get(i, j));
            }
        }
        out
    }

    /// Rebuild a matrix from row-major upper-triangular entries.
    pub fn from_upper_entries(dim: usize, upper: &[f64]) -> Result<Self> {
        let expected = pair_count(dim);
        if upper.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "{} upper entries for dimension {dim} (expected {expected})",
                upper.len()
            )));
        }
        let mut m = Self::new(dim)?;
        let mut it = upper.iter();
        for i in 0..dim {
            for j in (i + 1)..dim {
                m.set(i, j, *it.next().expect("length checked"))?;
            }
        }
        Ok(m)
    }

    /// Rank of pair `(i, j)`, `i < j`, in row-major pair order.
    pub fn pair_rank(dim: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < dim);
        // Pairs before row i: sum_{r<i} (dim-1-r); within row i: j - i - 1.
        i * (2 * dim - i - 1) / 2 + (j - i - 1)
    }
}

/// Number of unordered outcome pairs, `C (C - 1) / 2`.
pub fn pair_count(dim: usize) -> usize {
    dim * (dim - 1) / 2
}

/// A Monte Carlo estimate of a per-pair fold cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    /// Arithmetic mean of the per-sample H-entropy gaps.
    pub mean: f64,
    pub sample_count: usize,
    /// Unbiased sample variance of the per-sample gaps.
    pub sample_variance: f64,
}

impl MCEstimate {
    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        (self.sample_variance / self.sample_count as f64).sqrt()
    }
}

/// Average H-entropy increase of one fold over a fixed sample set.
pub fn integral_objective(
    loss: &LossMatrix,
    fold: Fold,
    samples: &[ProbVector],
    ext: SetExtension,
) -> Result<MCEstimate> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no Monte Carlo samples".into()));
    }
    fold.check_dim(loss.outcome_count())?;

    // The folded matrix depends on the sample only for the weighted-sum
    // extension; hoist it otherwise.
    let fixed_folded = if ext.needs_weights() {
        None
    } else {
        Some(loss.fold(fold, ext, None)?.matrix)
    };

    let n = samples.len();
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (k, p) in samples.iter().enumerate() {
        let before = loss.h_entropy(p)?;
        let q = p.fold(fold)?;
        let after = match &fixed_folded {
            Some(m) => m.h_entropy(&q)?,
            None => loss.fold(fold, ext, Some(p))?.matrix.h_entropy(&q)?,
        };
        let gap = after - before;
        // Welford, for a numerically stable variance in one pass.
        let delta = gap - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (gap - mean);
    }
    let sample_variance = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    Ok(MCEstimate {
        mean,
        sample_count: n,
        sample_variance,
    })
}

/// Fill the whole objective matrix with Monte Carlo means, reusing one
/// sample set across all pairs (common random numbers): only the relative
/// ordering of pairs matters, and shared samples cancel noise between them.
pub fn integral_objective_matrix(
    loss: &LossMatrix,
    sample_count: usize,
    seed: u64,
    ext: SetExtension,
) -> Result<ObjectiveMatrix> {
    let dim = loss.outcome_count();
    let samples = sample_simplex(sample_count, dim, seed)?;
    integral_objective_matrix_with_samples(loss, &samples, ext)
}

/// As [`integral_objective_matrix`], over a caller-provided sample set.
///
/// The expected losses `L p` are computed once per sample and each pair
/// only patches the merged column's contribution, so the whole matrix costs
/// `O(N |A| C^2)` — the per-pair work is `O(|A|)` beyond the shared cache.
pub fn integral_objective_matrix_with_samples(
    loss: &LossMatrix,
    samples: &[ProbVector],
    ext: SetExtension,
) -> Result<ObjectiveMatrix> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no Monte Carlo samples".into()));
    }
    let dim = loss.outcome_count();
    let actions = loss.action_count();
    let mut matrix = ObjectiveMatrix::new(dim)?;
    for p in samples {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "Monte Carlo sample vs loss matrix outcomes",
                expected: dim,
                actual: p.dim(),
            });
        }
    }

    // Shared per-sample cache: expected loss per action and its minimum.
    let mut expected = vec![0.0; samples.len() * actions];
    let mut base = vec![0.0; samples.len()];
    for (k, p) in samples.iter().enumerate() {
        let row = &mut expected[k * actions..(k + 1) * actions];
        let mut best = f64::INFINITY;
        for (a, slot) in row.iter_mut().enumerate() {
            let v: f64 = loss
                .row(a)
                .iter()
                .zip(p.entries())
                .map(|(l, q)| l * q)
                .sum();
            *slot = v;
            if v < best {
                best = v;
            }
        }
        base[k] = best;
    }

    let pairs: Vec<(usize, usize)> = upper_pairs(dim);
    let means: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut total = 0.0;
            for (k, p) in samples.iter().enumerate() {
                let pi = p.entries()[i];
                let pj = p.entries()[j];
                let row = &expected[k * actions..(k + 1) * actions];
                let mut after = f64::INFINITY;
                for (a, &v) in row.iter().enumerate() {
                    let li = loss.entry(a, i);
                    let lj = loss.entry(a, j);
                    let patched = match ext {
                        SetExtension::WorstCase => {
                            v - (li * pi + lj * pj) + li.max(lj) * (pi + pj)
                        }
                        SetExtension::Sum => {
                            v - (li * pi + lj * pj) + (li + lj) * (pi + pj)
                        }
                        // The mass-weighted column contributes exactly what
                        // the two originals did (0/0 fallback contributes
                        // nothing either way: the merged mass is zero).
                        SetExtension::WeightedSum => v,
                    };
                    if patched < after {
                        after = patched;
                    }
                }
                total += after - base[k];
            }
            total / samples.len() as f64
        })
        .collect();
    for ((i, j), mean) in pairs.into_iter().zip(means) {
        matrix.set(i, j, mean)?;
    }
    Ok(matrix)
}

/// H-entropy difference between the vertices being merged:
/// `|min_a L[a][i] - min_a L[a][j]|`. The matrix is left untouched during
/// evaluation; it is folded only after a pair is selected.
pub fn vertex_objective(loss: &LossMatrix, i: usize, j: usize) -> Result<f64> {
    let dim = loss.outcome_count();
    if i == j {
        return Err(Error::FoldSourceEqualsTarget(i));
    }
    for index in [i, j] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    Ok((loss.column_min(i) - loss.column_min(j)).abs())
}

/// All vertex-objective scores at once, from one pass over the columns.
pub fn vertex_objective_matrix(loss: &LossMatrix) -> Result<ObjectiveMatrix> {
    let dim = loss.outcome_count();
    let mut matrix = ObjectiveMatrix::new(dim)?;
    let mins: Vec<f64> = (0..dim).map(|z| loss.column_min(z)).collect();
    for i in 0..dim {
        for j in (i + 1)..dim {
            matrix.set(i, j, (mins[i] - mins[j]).abs())?;
        }
    }
    Ok(matrix)
}

/// Which score drives fold selection.
#[derive(Debug, Clone)]
pub enum Objective {
    /// Monte Carlo integral objective with this many samples per step.
    Integral { samples: usize },
    /// Concave-convex search for the worst-case increase.
    MaxIncrease(CcpConfig),
    /// Vertex objective.
    Vertex,
    /// A trained regressor predicting integral-objective entries. Outside
    /// the model's shape (after folds have shrunk the matrix) the caller
    /// falls back to the vertex objective.
    Surrogate(std::sync::Arc<SurrogateModel>),
}

impl Objective {
    pub fn name(&self) -> &'static str {
        match self {
            Objective::Integral { .. } => "integral",
            Objective::MaxIncrease(_) => "max-increase",
            Objective::Vertex => "vertex",
            Objective::Surrogate(_) => "surrogate",
        }
    }
}

/// Score every pair under the given objective.
pub fn objective_matrix(
    loss: &LossMatrix,
    objective: &Objective,
    ext: SetExtension,
    seed: u64,
) -> Result<ObjectiveMatrix> {
    match objective {
        Objective::Integral { samples } => {
            integral_objective_matrix(loss, *samples, seed, ext)
        }
        Objective::MaxIncrease(cfg) => max_increase_objective_matrix(loss, ext, cfg, seed),
        Objective::Vertex => vertex_objective_matrix(loss),
        Objective::Surrogate(model) => {
            if model.matches_shape(loss) {
                model.objective_matrix(loss)
            } else {
                vertex_objective_matrix(loss)
            }
        }
    }
}

/// Worst-case-increase scores for every pair, each from an independent
/// pair-indexed restart stream so any parallel schedule gives the same bits.
pub fn max_increase_objective_matrix(
    loss: &LossMatrix,
    ext: SetExtension,
    cfg: &CcpConfig,
    seed: u64,
) -> Result<ObjectiveMatrix> {
    let dim = loss.outcome_count();
    let mut matrix = ObjectiveMatrix::new(dim)?;
    let pairs = upper_pairs(dim);
    let values: Vec<Result<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let fold = Fold::new(i, j).expect("i < j");
            let pair_seed = substream(seed, ObjectiveMatrix::pair_rank(dim, i, j) as u64);
            Ok(ccp_max_increase(loss, fold, ext, cfg, pair_seed)?.value)
        })
        .collect();
    for ((i, j), value) in pairs.into_iter().zip(values) {
        matrix.set(i, j, value?)?;
    }
    Ok(matrix)
}

/// Pick the fold with the smallest objective value.
pub fn find_best_fold(
    loss: &LossMatrix,
    objective: &Objective,
    ext: SetExtension,
    seed: u64,
) -> Result<(Fold, ObjectiveMatrix)> {
    let matrix = objective_matrix(loss, objective, ext, seed)?;
    let (i, j) = matrix.argmin();
    Ok((Fold::new(i, j)?, matrix))
}

/// All unordered pairs `(i, j)`, `i < j`, in row-major order.
pub fn upper_pairs(dim: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(pair_count(dim));
    for i in 0..dim {
        for j in (i + 1)..dim {
            pairs.push((i, j));
        }
    }
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_action_loss() -> LossMatrix {
        LossMatrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn pair_rank_is_row_major() {
        // dim 4: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
        let ranks: Vec<usize> = upper_pairs(4)
            .into_iter()
            .map(|(i, j)| ObjectiveMatrix::pair_rank(4, i, j))
            .collect();
        assert_eq!(ranks, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn upper_entries_round_trip() {
        let mut m = ObjectiveMatrix::new(4).unwrap();
        for (k, (i, j)) in upper_pairs(4).into_iter().enumerate() {
            m.set(i, j, k as f64).unwrap();
        }
        let back = ObjectiveMatrix::from_upper_entries(4, &m.upper_entries()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn argmin_breaks_ties_lexicographically() {
        let m = ObjectiveMatrix::new(3).unwrap();
        let mut m = m;
        m.set(0, 1, 0.0).unwrap();
        m.set(0, 2, 0.0).unwrap();
        m.set(1, 2, 0.0).unwrap();
        assert_eq!(m.argmin(), (0, 1));
    }

    #[test]
    fn integral_objective_zero_for_identical_columns() {
        let loss =
            LossMatrix::from_rows(vec![vec![0.4, 0.4, 0.9], vec![0.6, 0.6, 0.2]]).unwrap();
        let samples = sample_simplex(500, 3, 17).unwrap();
        let est =
            integral_objective(&loss, Fold::new(0, 1).unwrap(), &samples, SetExtension::WorstCase)
                .unwrap();
        assert!(est.mean.abs() < 1e-15);
        assert!(est.sample_variance < 1e-30);
    }

    #[test]
    fn integral_objective_nonnegative_under_worst_case() {
        let loss = two_action_loss();
        let samples = sample_simplex(2000, 3, 3).unwrap();
        for (i, j) in upper_pairs(3) {
            let est = integral_objective(
                &loss,
                Fold::new(i, j).unwrap(),
                &samples,
                SetExtension::WorstCase,
            )
            .unwrap();
            assert!(est.mean >= -1e-9);
        }
    }

    #[test]
    fn matrix_dim_two_has_single_entry() {
        let loss = LossMatrix::from_rows(vec![vec![0.1, 0.9]]).unwrap();
        let m = integral_objective_matrix(&loss, 100, 5, SetExtension::WorstCase).unwrap();
        assert!(m.get(0, 1).is_finite());
        assert_eq!(m.upper_entries().len(), 1);
    }

    #[test]
    fn duplicate_columns_win_the_argmin() {
        // Columns 0 and 2 identical; the others pairwise far apart.
        let loss = LossMatrix::from_rows(vec![
            vec![0.1, 0.9, 0.1, 0.5],
            vec![0.8, 0.2, 0.8, 0.4],
        ])
        .unwrap();
        let m = integral_objective_matrix(&loss, 2000, 9, SetExtension::WorstCase).unwrap();
        assert!(m.get(0, 2).abs() < 1e-15);
        assert_eq!(m.argmin(), (0, 2));
        let (fold, _) =
            find_best_fold(&loss, &Objective::Integral { samples: 2000 }, SetExtension::WorstCase, 9)
                .unwrap();
        assert_eq!((fold.source(), fold.target()), (0, 2));
    }

    #[test]
    fn vertex_objective_examples() {
        let loss = LossMatrix::from_rows(vec![vec![0.2, 0.9], vec![0.7, 0.1]]).unwrap();
        let v = vertex_objective(&loss, 0, 1).unwrap();
        assert!((v - 0.1).abs() < 1e-12);
        assert_eq!(
            vertex_objective(&loss, 0, 1).unwrap(),
            vertex_objective(&loss, 1, 0).unwrap()
        );

        let zero = two_action_loss();
        for (i, j) in upper_pairs(3) {
            assert_eq!(vertex_objective(&zero, i, j).unwrap(), 0.0);
        }
    }

    #[test]
    fn vertex_matrix_matches_one_hot_h_entropy() {
        let loss = LossMatrix::from_rows(vec![
            vec![0.3, 0.6, 0.2, 0.9],
            vec![0.5, 0.1, 0.8, 0.4],
        ])
        .unwrap();
        let m = vertex_objective_matrix(&loss).unwrap();
        for (i, j) in upper_pairs(4) {
            let hi = loss.h_entropy(&ProbVector::one_hot(4, i).unwrap()).unwrap();
            let hj = loss.h_entropy(&ProbVector::one_hot(4, j).unwrap()).unwrap();
            assert!((m.get(i, j) - (hi - hj).abs()).abs() < 1e-12);
        }
    }

    #[test]
    fn vertex_ties_give_first_pair() {
        let loss = two_action_loss();
        let (fold, _) =
            find_best_fold(&loss, &Objective::Vertex, SetExtension::WorstCase, 0).unwrap();
        assert_eq!((fold.source(), fold.target()), (0, 1));
    }

    #[test]
    fn dim_two_selects_only_pair() {
        let loss = LossMatrix::from_rows(vec![vec![0.3, 0.8], vec![0.6, 0.1]]).unwrap();
        let (fold, _) =
            find_best_fold(&loss, &Objective::Vertex, SetExtension::WorstCase, 0).unwrap();
        assert_eq!((fold.source(), fold.target()), (0, 1));
    }

    #[test]
    fn integral_matrix_is_deterministic_given_seed() {
        let loss = two_action_loss();
        let a = integral_objective_matrix(&loss, 400, 21, SetExtension::WorstCase).unwrap();
        let b = integral_objective_matrix(&loss, 400, 21, SetExtension::WorstCase).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn max_increase_matrix_is_deterministic() {
        let loss = crate::loss::uniform_loss_matrix(2, 4, 17).unwrap();
        let cfg = crate::ccp::CcpConfig {
            restarts: 2,
            ..Default::default()
        };
        let a =
            max_increase_objective_matrix(&loss, SetExtension::WorstCase, &cfg, 5).unwrap();
        let b =
            max_increase_objective_matrix(&loss, SetExtension::WorstCase, &cfg, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn matrix_patch_path_agrees_with_per_pair_path() {
        let loss = crate::loss::uniform_loss_matrix(3, 5, 42).unwrap();
        let samples = sample_simplex(300, 5, 9).unwrap();
        for ext in [SetExtension::WorstCase, SetExtension::Sum] {
            let matrix =
                integral_objective_matrix_with_samples(&loss, &samples, ext).unwrap();
            for (i, j) in upper_pairs(5) {
                let direct =
                    integral_objective(&loss, Fold::new(i, j).unwrap(), &samples, ext)
                        .unwrap()
                        .mean;
                assert!(
                    (matrix.get(i, j) - direct).abs() < 1e-12,
                    "pair ({i},{j}) under {ext}: {} vs {direct}",
                    matrix.get(i, j)
                );
            }
        }
    }

    #[test]
    fn weighted_sum_matrix_is_exactly_zero() {
        let loss = crate::loss::uniform_loss_matrix(2, 4, 3).unwrap();
        let m = integral_objective_matrix(&loss, 200, 8, SetExtension::WeightedSum).unwrap();
        for (i, j) in upper_pairs(4) {
            assert_eq!(m.get(i, j), 0.0);
        }
    }
}
