//! Decision losses over finite outcome spaces.
//!
//! All task knowledge enters through a [`LossMatrix`]: one row per action,
//! one column per outcome, entry `(a, z)` the cost of taking action `a` when
//! outcome `z` occurs. The decision value of a distribution `p` is
//!
//! ```text
//! H(p) = min over actions a of sum_z L[a][z] * p[z]
//! ```
//!
//! the expected loss of the best action against `p`. It is concave and
//! piecewise linear in `p`; we call it the H-entropy of `p` under `L`.
//! Folding two outcomes together replaces their columns by a single merged
//! column chosen by a [`SetExtension`], and the difference in H-entropy
//! before and after the fold is the suboptimality gap the fold costs a
//! decision-maker.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{Fold, ProbVector, SetExtension};

/// A finite decision loss: `actions x outcomes`, row-major.
///
/// Entries may be negative; only finiteness is enforced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossMatrix {
    action_count: usize,
    outcome_count: usize,
    entries: Vec<f64>,
}

impl LossMatrix {
    /// Build from per-action rows. All rows must share one length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidLossMatrix("no actions".into()));
        }
        let outcome_count = rows[0].len();
        if outcome_count == 0 {
            return Err(Error::InvalidLossMatrix("no outcomes".into()));
        }
        let mut entries = Vec::with_capacity(rows.len() * outcome_count);
        for (a, row) in rows.iter().enumerate() {
            if row.len() != outcome_count {
                return Err(Error::InvalidLossMatrix(format!(
                    "row {a} has {} entries, expected {outcome_count}",
                    row.len()
                )));
            }
            for (z, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(Error::InvalidLossMatrix(format!(
                        "non-finite entry {x} at action {a}, outcome {z}"
                    )));
                }
                entries.push(x);
            }
        }
        Ok(Self {
            action_count: rows.len(),
            outcome_count,
            entries,
        })
    }

    /// Build from a flat row-major buffer.
    pub fn from_flat(action_count: usize, outcome_count: usize, entries: Vec<f64>) -> Result<Self> {
        if action_count == 0 || outcome_count == 0 {
            return Err(Error::InvalidLossMatrix(
                "action and outcome counts must be >= 1".into(),
            ));
        }
        if entries.len() != action_count * outcome_count {
            return Err(Error::InvalidLossMatrix(format!(
                "{} entries for a {action_count} x {outcome_count} matrix",
                entries.len()
            )));
        }
        if let Some(x) = entries.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidLossMatrix(format!("non-finite entry {x}")));
        }
        Ok(Self {
            action_count,
            outcome_count,
            entries,
        })
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn outcome_count(&self) -> usize {
        self.outcome_count
    }

    pub fn entry(&self, action: usize, outcome: usize) -> f64 {
        debug_assert!(action < self.action_count && outcome < self.outcome_count);
        self.entries[action * self.outcome_count + outcome]
    }

    pub fn row(&self, action: usize) -> &[f64] {
        let start = action * self.outcome_count;
        &self.entries[start..start + self.outcome_count]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.outcome_count)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.entries
    }

    /// Smallest entry of column `outcome`: the H-entropy at that vertex.
    pub fn column_min(&self, outcome: usize) -> f64 {
        (0..self.action_count)
            .map(|a| self.entry(a, outcome))
            .fold(f64::INFINITY, f64::min)
    }

    /// Restrict to a subset of outcome columns, preserving their order.
    pub fn restrict_columns(&self, outcomes: &[usize]) -> Result<LossMatrix> {
        if outcomes.is_empty() {
            return Err(Error::InvalidLossMatrix("no columns selected".into()));
        }
        let mut entries = Vec::with_capacity(self.action_count * outcomes.len());
        for a in 0..self.action_count {
            for &z in outcomes {
                if z >= self.outcome_count {
                    return Err(Error::IndexOutOfRange {
                        index: z,
                        dim: self.outcome_count,
                    });
                }
                entries.push(self.entry(a, z));
            }
        }
        LossMatrix::from_flat(self.action_count, outcomes.len(), entries)
    }

    /// Expected loss of each action against `p`: the vector `L p`.
    pub fn expected_losses(&self, p: &ProbVector) -> Result<Vec<f64>> {
        self.check_outcome_dim(p.dim())?;
        Ok(self
            .rows()
            .map(|row| dot(row, p.entries()))
            .collect())
    }

    /// The H-entropy `min_a (L p)`: the expected loss of the best action.
    pub fn h_entropy(&self, p: &ProbVector) -> Result<f64> {
        self.check_outcome_dim(p.dim())?;
        let mut best = f64::INFINITY;
        for row in self.rows() {
            let v = dot(row, p.entries());
            if v < best {
                best = v;
            }
        }
        Ok(best)
    }

    /// The action attaining the H-entropy; ties broken toward the smallest
    /// index so policies stay reproducible.
    pub fn argmin_action(&self, p: &ProbVector) -> Result<usize> {
        self.check_outcome_dim(p.dim())?;
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for (a, row) in self.rows().enumerate() {
            let v = dot(row, p.entries());
            if v < best {
                best = v;
                arg = a;
            }
        }
        Ok(arg)
    }

    /// Merge two outcome columns under a set extension.
    ///
    /// The merged column sits where [`Fold::merged_index`] says; the others
    /// keep their order. The weighted-sum extension reads its weights from
    /// `weights` (the distribution being folded); when those two outcomes
    /// carry no mass its formula is 0/0, and the merged column falls back to
    /// the worst-case rule with [`FoldedLoss::degenerate_fallback`] set.
    pub fn fold(
        &self,
        fold: Fold,
        ext: SetExtension,
        weights: Option<&ProbVector>,
    ) -> Result<FoldedLoss> {
        fold.check_dim(self.outcome_count)?;
        let (i, j) = (fold.source(), fold.target());

        let mut merge: Box<dyn Fn(f64, f64) -> f64> = match ext {
            SetExtension::WorstCase => Box::new(f64::max),
            SetExtension::Sum => Box::new(|a, b| a + b),
            SetExtension::WeightedSum => {
                let p = weights.ok_or(Error::MissingWeightContext)?;
                self.check_outcome_dim(p.dim())?;
                let pi = p.entries()[i];
                let pj = p.entries()[j];
                if pi + pj <= 0.0 {
                    // 0/0: handled below via the fallback path.
                    Box::new(f64::max)
                } else {
                    Box::new(move |a, b| (a * pi + b * pj) / (pi + pj))
                }
            }
        };
        let degenerate_fallback = matches!(ext, SetExtension::WeightedSum)
            && weights.map(|p| p.entries()[i] + p.entries()[j] <= 0.0) == Some(true);
        if degenerate_fallback {
            merge = Box::new(f64::max);
        }

        let new_cols = self.outcome_count - 1;
        let mut entries = Vec::with_capacity(self.action_count * new_cols);
        for a in 0..self.action_count {
            let merged = merge(self.entry(a, i), self.entry(a, j));
            for z in 0..self.outcome_count {
                if z == i {
                    continue;
                }
                if z == j {
                    entries.push(merged);
                } else {
                    entries.push(self.entry(a, z));
                }
            }
        }
        Ok(FoldedLoss {
            matrix: LossMatrix {
                action_count: self.action_count,
                outcome_count: new_cols,
                entries,
            },
            degenerate_fallback,
        })
    }

    fn check_outcome_dim(&self, dim: usize) -> Result<()> {
        if dim != self.outcome_count {
            return Err(Error::DimensionMismatch {
                context: "loss matrix outcomes vs probability vector",
                expected: self.outcome_count,
                actual: dim,
            });
        }
        Ok(())
    }
}

/// Result of folding a loss matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldedLoss {
    pub matrix: LossMatrix,
    /// True when a weighted-sum merge had zero mass on both outcomes and
    /// fell back to the worst-case rule.
    pub degenerate_fallback: bool,
}

/// A loss matrix with entries drawn uniformly from `[0, 1)`.
pub fn uniform_loss_matrix(
    action_count: usize,
    outcome_count: usize,
    seed: u64,
) -> Result<LossMatrix> {
    use rand::Rng as _;
    let mut rng = crate::seed::rng_from_seed(seed);
    let flat = (0..action_count * outcome_count)
        .map(|_| rng.random::<f64>())
        .collect();
    LossMatrix::from_flat(action_count, outcome_count, flat)
}

/// H-entropy increase caused by one fold: `H(folded L, folded p) - H(L, p)`.
///
/// Nonnegative under the worst-case extension; zero (up to rounding) under
/// the weighted-sum extension.
pub fn subopt_gap(
    loss: &LossMatrix,
    p: &ProbVector,
    fold: Fold,
    ext: SetExtension,
) -> Result<f64> {
    let before = loss.h_entropy(p)?;
    let folded = loss.fold(fold, ext, Some(p))?;
    let q = p.fold(fold)?;
    let after = folded.matrix.h_entropy(&q)?;
    Ok(after - before)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_action_loss() -> LossMatrix {
        LossMatrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn h_entropy_at_vertex() {
        let loss = two_action_loss();
        let p = ProbVector::one_hot(3, 0).unwrap();
        assert_eq!(loss.h_entropy(&p).unwrap(), 0.0);
    }

    #[test]
    fn h_entropy_at_uniform() {
        let loss = two_action_loss();
        let p = ProbVector::uniform(3).unwrap();
        let h = loss.h_entropy(&p).unwrap();
        assert!((h - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn h_entropy_interior() {
        let loss = two_action_loss();
        let p = ProbVector::new(vec![0.4, 0.35, 0.25]).unwrap();
        assert!((loss.h_entropy(&p).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn argmin_action_picks_best_row() {
        let loss = two_action_loss();
        let p = ProbVector::new(vec![0.4, 0.35, 0.25]).unwrap();
        assert_eq!(loss.argmin_action(&p).unwrap(), 1);
    }

    #[test]
    fn argmin_action_breaks_ties_low() {
        let loss = two_action_loss();
        let p = ProbVector::uniform(3).unwrap();
        assert_eq!(loss.argmin_action(&p).unwrap(), 0);
    }

    #[test]
    fn argmin_action_single_row() {
        let loss = LossMatrix::from_rows(vec![vec![3.0, 1.0]]).unwrap();
        let p = ProbVector::uniform(2).unwrap();
        assert_eq!(loss.argmin_action(&p).unwrap(), 0);
    }

    #[test]
    fn fold_worst_case_takes_column_max() {
        let loss = two_action_loss();
        let folded = loss
            .fold(Fold::new(1, 2).unwrap(), SetExtension::WorstCase, None)
            .unwrap();
        assert_eq!(
            folded.matrix,
            LossMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
        );
        assert!(!folded.degenerate_fallback);
    }

    #[test]
    fn fold_sum_adds_columns() {
        let loss = two_action_loss();
        let folded = loss
            .fold(Fold::new(1, 2).unwrap(), SetExtension::Sum, None)
            .unwrap();
        assert_eq!(
            folded.matrix,
            LossMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
        );
    }

    #[test]
    fn fold_weighted_sum_averages_by_mass() {
        let loss = two_action_loss();
        let p = ProbVector::new(vec![0.5, 0.25, 0.25]).unwrap();
        let folded = loss
            .fold(Fold::new(1, 2).unwrap(), SetExtension::WeightedSum, Some(&p))
            .unwrap();
        assert_eq!(
            folded.matrix,
            LossMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 0.5]]).unwrap()
        );
    }

    #[test]
    fn fold_weighted_sum_zero_mass_falls_back() {
        let loss = two_action_loss();
        let p = ProbVector::one_hot(3, 0).unwrap();
        let folded = loss
            .fold(Fold::new(1, 2).unwrap(), SetExtension::WeightedSum, Some(&p))
            .unwrap();
        assert!(folded.degenerate_fallback);
        assert_eq!(
            folded.matrix,
            LossMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
        );
    }

    #[test]
    fn fold_weighted_sum_requires_weights() {
        let loss = two_action_loss();
        assert!(matches!(
            loss.fold(Fold::new(1, 2).unwrap(), SetExtension::WeightedSum, None),
            Err(Error::MissingWeightContext)
        ));
    }

    #[test]
    fn gap_zero_for_identical_columns() {
        let loss =
            LossMatrix::from_rows(vec![vec![0.3, 0.3, 0.9], vec![0.7, 0.7, 0.1]]).unwrap();
        for p in crate::simplex::sample_simplex(50, 3, 5).unwrap() {
            let gap = subopt_gap(&loss, &p, Fold::new(0, 1).unwrap(), SetExtension::WorstCase)
                .unwrap();
            assert!(gap.abs() < 1e-12);
        }
    }

    #[test]
    fn gap_worked_example() {
        let loss = two_action_loss();
        let p = ProbVector::new(vec![0.4, 0.35, 0.25]).unwrap();
        let gap =
            subopt_gap(&loss, &p, Fold::new(1, 2).unwrap(), SetExtension::WorstCase).unwrap();
        assert!((gap - 0.15).abs() < 1e-12);
    }

    #[test]
    fn gap_vanishes_under_weighted_sum() {
        let loss = two_action_loss();
        for p in crate::simplex::sample_simplex(50, 3, 11).unwrap() {
            let gap =
                subopt_gap(&loss, &p, Fold::new(0, 2).unwrap(), SetExtension::WeightedSum)
                    .unwrap();
            assert!(gap.abs() <= 1e-9);
        }
    }

    #[test]
    fn restrict_columns_keeps_order() {
        let loss = two_action_loss();
        let sub = loss.restrict_columns(&[2, 0]).unwrap();
        assert_eq!(
            sub,
            LossMatrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
        );
    }

    #[test]
    fn rejects_non_finite_and_ragged() {
        assert!(LossMatrix::from_rows(vec![vec![f64::INFINITY]]).is_err());
        assert!(LossMatrix::from_rows(vec![vec![1.0, 2.0], vec![3.0]]).is_err());
        assert!(LossMatrix::from_rows(vec![]).is_err());
    }

    #[test]
    fn negative_entries_are_allowed() {
        let loss = LossMatrix::from_rows(vec![vec![-1.0, 2.0]]).unwrap();
        assert_eq!(loss.column_min(0), -1.0);
    }
}
