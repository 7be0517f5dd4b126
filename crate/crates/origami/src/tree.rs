//! The greedy folding driver and its bookkeeping.
//!
//! Folding one pair at a time builds a merge tree: original outcomes are
//! leaves, every accepted fold creates a new node over two frontier nodes,
//! and the frontier at any moment reads off the current partition of the
//! outcome set. [`run_origami`] drives the loop — score pairs, fold the
//! argmin, repeat until a [`StopRule`] fires — and returns the tree, the
//! final partition, and the folded loss matrix, whose columns line up with
//! the partition's cells.
//!
//! Node ids are stable: leaves are `0..C`, the node created by step `k` is
//! `C + k`. Positions (column indices of the shrinking matrices) are
//! recomputed from the merge list whenever needed, so a serialized tree
//! fully determines every intermediate relabeling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss::LossMatrix;
use crate::objective::{find_best_fold, Objective};
use crate::seed::substream;
use crate::simplex::{Fold, ProbVector, SetExtension};

/// One accepted fold, recorded by node id.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub step: usize,
    /// Node folded away.
    pub source: usize,
    /// Node that absorbed it; the merge creates node `leaf_count + step`
    /// covering both.
    pub target: usize,
    /// Objective value of the selected pair at that step.
    pub objective: f64,
}

/// A merge tree over `leaf_count` original outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldTree {
    leaf_count: usize,
    merges: Vec<Merge>,
}

impl FoldTree {
    pub fn new(leaf_count: usize) -> Result<Self> {
        if leaf_count == 0 {
            return Err(Error::InvalidArgument("tree needs at least one leaf".into()));
        }
        Ok(Self {
            leaf_count,
            merges: Vec::new(),
        })
    }

    /// Rebuild from parts (deserialization path); replays the merges to
    /// verify they reference live nodes.
    pub fn from_parts(leaf_count: usize, merges: Vec<Merge>) -> Result<Self> {
        let tree = Self { leaf_count, merges };
        tree.frontier()?;
        Ok(tree)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    pub fn fold_count(&self) -> usize {
        self.merges.len()
    }

    /// Cells remaining after all recorded folds.
    pub fn cell_count(&self) -> usize {
        self.leaf_count - self.merges.len()
    }

    /// Record a fold given by current frontier *positions*.
    pub fn push_fold(&mut self, fold: Fold, objective: f64) -> Result<()> {
        let frontier = self.frontier()?;
        fold.check_dim(frontier.node_ids.len())?;
        self.merges.push(Merge {
            step: self.merges.len(),
            source: frontier.node_ids[fold.source()],
            target: frontier.node_ids[fold.target()],
            objective,
        });
        Ok(())
    }

    /// The current frontier: node ids and covered leaves, in positional
    /// order (the column order of the folded loss matrix).
    pub fn frontier(&self) -> Result<Frontier> {
        let mut node_ids: Vec<usize> = (0..self.leaf_count).collect();
        let mut cells: Vec<Vec<usize>> = (0..self.leaf_count).map(|z| vec![z]).collect();
        for merge in &self.merges {
            let si = position_of(&node_ids, merge.source, merge.step)?;
            let ti = position_of(&node_ids, merge.target, merge.step)?;
            if si == ti {
                return Err(Error::InvalidArgument(format!(
                    "merge step {} folds node {} onto itself",
                    merge.step, merge.source
                )));
            }
            let mut absorbed = cells.remove(si);
            let ti = if si < ti { ti - 1 } else { ti };
            cells[ti].append(&mut absorbed);
            cells[ti].sort_unstable();
            node_ids.remove(si);
            node_ids[ti] = self.leaf_count + merge.step;
        }
        Ok(Frontier { node_ids, cells })
    }

    /// The folds as positional (source, target) pairs, one per step.
    pub fn positional_folds(&self) -> Result<Vec<Fold>> {
        let mut node_ids: Vec<usize> = (0..self.leaf_count).collect();
        let mut folds = Vec::with_capacity(self.merges.len());
        for merge in &self.merges {
            let si = position_of(&node_ids, merge.source, merge.step)?;
            let ti = position_of(&node_ids, merge.target, merge.step)?;
            folds.push(Fold::new(si, ti)?);
            node_ids.remove(si);
            let ti = if si < ti { ti - 1 } else { ti };
            node_ids[ti] = self.leaf_count + merge.step;
        }
        Ok(folds)
    }

    /// The partition read off the frontier.
    pub fn partition(&self) -> Result<Partition> {
        Ok(Partition {
            cells: self.frontier()?.cells,
        })
    }

    /// Push a probability vector through every recorded fold.
    pub fn replay_prob(&self, p: &ProbVector) -> Result<ProbVector> {
        if p.dim() != self.leaf_count {
            return Err(Error::DimensionMismatch {
                context: "fold tree leaves vs probability vector",
                expected: self.leaf_count,
                actual: p.dim(),
            });
        }
        let mut q = p.clone();
        for fold in self.positional_folds()? {
            q = q.fold(fold)?;
        }
        Ok(q)
    }

    /// Push a loss matrix through every recorded fold under a
    /// mass-independent extension (worst-case or sum).
    pub fn replay_loss(&self, loss: &LossMatrix, ext: SetExtension) -> Result<LossMatrix> {
        if ext.needs_weights() {
            return Err(Error::MissingWeightContext);
        }
        if loss.outcome_count() != self.leaf_count {
            return Err(Error::DimensionMismatch {
                context: "fold tree leaves vs loss matrix outcomes",
                expected: self.leaf_count,
                actual: loss.outcome_count(),
            });
        }
        let mut folded = loss.clone();
        for fold in self.positional_folds()? {
            folded = folded.fold(fold, ext, None)?.matrix;
        }
        Ok(folded)
    }
}

/// Frontier of a [`FoldTree`]: positions map one-to-one onto the columns of
/// the folded loss matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    /// Node id at each position.
    pub node_ids: Vec<usize>,
    /// Leaves covered by each position, sorted ascending.
    pub cells: Vec<Vec<usize>>,
}

fn position_of(node_ids: &[usize], node: usize, step: usize) -> Result<usize> {
    node_ids
        .iter()
        .position(|&id| id == node)
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "merge step {step} references node {node}, not on the frontier"
            ))
        })
}

/// A disjoint cover of the outcome set `{0..C-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    cells: Vec<Vec<usize>>,
}

impl Partition {
    /// Validate cells: nonempty, pairwise disjoint, covering `0..leaf_count`.
    pub fn new(cells: Vec<Vec<usize>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidArgument("partition with no cells".into()));
        }
        let leaf_count: usize = cells.iter().map(|c| c.len()).sum();
        let mut seen = vec![false; leaf_count];
        for cell in &cells {
            if cell.is_empty() {
                return Err(Error::InvalidArgument("empty partition cell".into()));
            }
            for &z in cell {
                if z >= leaf_count || seen[z] {
                    return Err(Error::InvalidArgument(format!(
                        "outcome {z} missing or duplicated across cells"
                    )));
                }
                seen[z] = true;
            }
        }
        let mut cells = cells;
        for cell in cells.iter_mut() {
            cell.sort_unstable();
        }
        Ok(Self { cells })
    }

    pub fn singletons(leaf_count: usize) -> Result<Self> {
        Self::new((0..leaf_count).map(|z| vec![z]).collect())
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.cells.iter().map(|c| c.len()).sum()
    }

    /// Index of the cell containing an outcome.
    pub fn cell_of(&self, outcome: usize) -> Result<usize> {
        self.cells
            .iter()
            .position(|cell| cell.binary_search(&outcome).is_ok())
            .ok_or(Error::IndexOutOfRange {
                index: outcome,
                dim: self.leaf_count(),
            })
    }

    /// Sum outcome probabilities within each cell.
    pub fn project_prob(&self, p: &ProbVector) -> Result<ProbVector> {
        if p.dim() != self.leaf_count() {
            return Err(Error::DimensionMismatch {
                context: "partition leaves vs probability vector",
                expected: self.leaf_count(),
                actual: p.dim(),
            });
        }
        let entries = self
            .cells
            .iter()
            .map(|cell| cell.iter().map(|&z| p.entries()[z]).sum())
            .collect();
        ProbVector::new(entries)
    }

    /// Project a loss matrix straight through the cover: each cell's column
    /// is the member-wise max (worst-case) or sum of its columns. Equals the
    /// step-by-step fold of any tree with this frontier, exactly for
    /// worst-case and up to summation order for sum.
    pub fn project_loss(&self, loss: &LossMatrix, ext: SetExtension) -> Result<LossMatrix> {
        if ext.needs_weights() {
            return Err(Error::MissingWeightContext);
        }
        if loss.outcome_count() != self.leaf_count() {
            return Err(Error::DimensionMismatch {
                context: "partition leaves vs loss matrix outcomes",
                expected: self.leaf_count(),
                actual: loss.outcome_count(),
            });
        }
        let mut rows = Vec::with_capacity(loss.action_count());
        for a in 0..loss.action_count() {
            let row = self
                .cells
                .iter()
                .map(|cell| {
                    cell.iter()
                        .map(|&z| loss.entry(a, z))
                        .fold(match ext {
                            SetExtension::WorstCase => f64::NEG_INFINITY,
                            _ => 0.0,
                        }, |acc, v| match ext {
                            SetExtension::WorstCase => acc.max(v),
                            _ => acc + v,
                        })
                })
                .collect();
            rows.push(row);
        }
        LossMatrix::from_rows(rows)
    }
}

/// Map fine-grained labels to the frontier cells that contain them.
pub fn project_dataset(tree: &FoldTree, labels: &[usize]) -> Result<Vec<usize>> {
    let partition = tree.partition()?;
    let mut lookup = vec![usize::MAX; tree.leaf_count()];
    for (cell_index, cell) in partition.cells().iter().enumerate() {
        for &z in cell {
            lookup[z] = cell_index;
        }
    }
    labels
        .iter()
        .map(|&z| {
            lookup.get(z).copied().filter(|&c| c != usize::MAX).ok_or(
                Error::IndexOutOfRange {
                    index: z,
                    dim: tree.leaf_count(),
                },
            )
        })
        .collect()
}

/// When the greedy loop ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StopRule {
    /// Exactly this many folds.
    FoldCount(usize),
    /// Fold until this many cells remain (`C - n` folds).
    TargetCells(usize),
    /// Fold while the cumulative gap over the probe stays within the
    /// tolerance; the fold that would cross it is rolled back.
    GapTolerance {
        tolerance: f64,
        probe: Vec<ProbVector>,
    },
}

impl StopRule {
    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            StopRule::FoldCount(k) => {
                if *k > dim - 1 {
                    return Err(Error::UnsatisfiableStop(format!(
                        "{k} folds requested, at most {} possible",
                        dim - 1
                    )));
                }
            }
            StopRule::TargetCells(n) => {
                if *n == 0 || *n > dim {
                    return Err(Error::UnsatisfiableStop(format!(
                        "{n} cells requested from {dim} outcomes"
                    )));
                }
            }
            StopRule::GapTolerance { tolerance, probe } => {
                if *tolerance < 0.0 {
                    return Err(Error::UnsatisfiableStop(
                        "negative gap tolerance".into(),
                    ));
                }
                if probe.is_empty() {
                    return Err(Error::InvalidArgument("empty gap probe".into()));
                }
                for p in probe {
                    if p.dim() != dim {
                        return Err(Error::DimensionMismatch {
                            context: "gap probe vs loss matrix outcomes",
                            expected: dim,
                            actual: p.dim(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Restrict the rule to a smaller outcome set (hierarchical inner runs):
    /// counts clamp, probes do not transfer.
    fn clamped(&self, dim: usize) -> StopRule {
        match self {
            StopRule::FoldCount(k) => StopRule::FoldCount((*k).min(dim - 1)),
            StopRule::TargetCells(n) => StopRule::TargetCells((*n).min(dim)),
            StopRule::GapTolerance { tolerance, probe } => StopRule::GapTolerance {
                tolerance: *tolerance,
                probe: probe.clone(),
            },
        }
    }
}

/// Everything a greedy run produces.
#[derive(Debug, Clone)]
pub struct OrigamiRun {
    pub tree: FoldTree,
    pub partition: Partition,
    /// The loss matrix after all accepted folds; columns follow the
    /// partition's cell order.
    pub folded_loss: LossMatrix,
    /// The reference distribution folded alongside, when one was given.
    pub folded_reference: Option<ProbVector>,
    /// Folds whose weighted-sum merge hit zero mass and fell back to the
    /// worst-case rule.
    pub degenerate_folds: usize,
}

/// Greedily fold `loss` until the stop rule fires.
///
/// `reference` is the distribution whose mass weights the merged columns
/// under the weighted-sum extension; it is folded alongside the matrix and
/// is required for that extension only.
pub fn run_origami(
    loss: &LossMatrix,
    objective: &Objective,
    ext: SetExtension,
    reference: Option<&ProbVector>,
    stop: &StopRule,
    seed: u64,
) -> Result<OrigamiRun> {
    let dim = loss.outcome_count();
    if dim < 2 {
        return Err(Error::InvalidArgument(
            "folding needs at least two outcomes".into(),
        ));
    }
    stop.validate(dim)?;
    if ext.needs_weights() {
        let r = reference.ok_or(Error::MissingWeightContext)?;
        if r.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "reference distribution vs loss matrix outcomes",
                expected: dim,
                actual: r.dim(),
            });
        }
    }

    let mut tree = FoldTree::new(dim)?;
    let mut current = loss.clone();
    let mut current_ref = reference.cloned();
    let mut degenerate_folds = 0;

    // Incremental gap-probe state for mass-independent extensions.
    let mut probe_state: Option<(Vec<ProbVector>, Vec<f64>)> = match stop {
        StopRule::GapTolerance { probe, .. } if !ext.needs_weights() => {
            let base: Result<Vec<f64>> = probe.iter().map(|p| loss.h_entropy(p)).collect();
            Some((probe.clone(), base?))
        }
        _ => None,
    };

    loop {
        let cells = current.outcome_count();
        let done = match stop {
            StopRule::FoldCount(k) => tree.fold_count() == *k,
            StopRule::TargetCells(n) => cells == *n,
            StopRule::GapTolerance { .. } => cells == 1,
        };
        if done {
            break;
        }

        let step_seed = substream(seed, tree.fold_count() as u64);
        let (fold, matrix) = find_best_fold(&current, objective, ext, step_seed)?;
        let value = matrix.get(fold.source(), fold.target());

        let folded = current.fold(fold, ext, current_ref.as_ref())?;

        if let StopRule::GapTolerance { tolerance, probe } = stop {
            let crossed = match &probe_state {
                Some((qs, base)) => {
                    let mut total = 0.0;
                    for (q, h0) in qs.iter().zip(base) {
                        total += folded.matrix.h_entropy(&q.fold(fold)?)? - h0;
                    }
                    total / qs.len() as f64 > *tolerance
                }
                None => {
                    // Weighted-sum: replay the tentative tree per sample.
                    let mut tentative = tree.clone();
                    tentative.push_fold(fold, value)?;
                    cumulative_gap(&tentative, loss, probe, ext)? > *tolerance
                }
            };
            if crossed {
                break;
            }
            if let Some((qs, _)) = probe_state.as_mut() {
                for q in qs.iter_mut() {
                    *q = q.fold(fold)?;
                }
            }
        }

        tree.push_fold(fold, value)?;
        if folded.degenerate_fallback {
            degenerate_folds += 1;
        }
        current = folded.matrix;
        if let Some(r) = current_ref.take() {
            current_ref = Some(r.fold(fold)?);
        }
    }

    let partition = tree.partition()?;
    Ok(OrigamiRun {
        tree,
        partition,
        folded_loss: current,
        folded_reference: current_ref,
        degenerate_folds,
    })
}

/// Mean H-entropy increase over a probe after replaying a tree's folds.
pub fn cumulative_gap(
    tree: &FoldTree,
    original: &LossMatrix,
    probe: &[ProbVector],
    ext: SetExtension,
) -> Result<f64> {
    if probe.is_empty() {
        return Err(Error::InvalidArgument("empty gap probe".into()));
    }
    let folds = tree.positional_folds()?;
    let fixed_folded = if ext.needs_weights() {
        None
    } else {
        Some(tree.replay_loss(original, ext)?)
    };
    let mut total = 0.0;
    for p in probe {
        let before = original.h_entropy(p)?;
        let after = match &fixed_folded {
            Some(folded) => folded.h_entropy(&tree.replay_prob(p)?)?,
            None => {
                let mut loss = original.clone();
                let mut q = p.clone();
                for &fold in &folds {
                    loss = loss.fold(fold, ext, Some(&q))?.matrix;
                    q = q.fold(fold)?;
                }
                loss.h_entropy(&q)?
            }
        };
        total += after - before;
    }
    Ok(total / probe.len() as f64)
}

/// A node of a hierarchical (tree-of-sets) abstraction.
#[derive(Debug, Clone)]
pub struct HierarchyNode {
    /// Original outcome indices this node covers, sorted.
    pub outcomes: Vec<usize>,
    /// The folding run performed inside this node, when one ran.
    pub tree: Option<FoldTree>,
    /// One child per cell of that run's partition; empty at the leaves.
    pub children: Vec<HierarchyNode>,
}

impl HierarchyNode {
    /// The finest cells of the hierarchy, left to right.
    pub fn leaf_cells(&self) -> Vec<Vec<usize>> {
        if self.children.is_empty() {
            vec![self.outcomes.clone()]
        } else {
            self.children
                .iter()
                .flat_map(|c| c.leaf_cells())
                .collect()
        }
    }
}

/// Run the greedy fold, then recurse into each resulting cell on the
/// original matrix restricted to that cell's columns (the folded matrix has
/// already lost within-cell distinctions). `max_depth` counts run levels;
/// 2 means one outer run plus one inner run per cell.
#[allow(clippy::too_many_arguments)]
pub fn hierarchical_origami(
    loss: &LossMatrix,
    objective: &Objective,
    ext: SetExtension,
    reference: Option<&ProbVector>,
    outer_stop: &StopRule,
    inner_stop: &StopRule,
    seed: u64,
    max_depth: usize,
) -> Result<HierarchyNode> {
    if max_depth == 0 {
        return Err(Error::InvalidArgument("hierarchy depth must be >= 1".into()));
    }
    let outcomes: Vec<usize> = (0..loss.outcome_count()).collect();
    hierarchical_inner(
        loss, objective, ext, reference, outer_stop, inner_stop, seed, max_depth, &outcomes,
    )
}

#[allow(clippy::too_many_arguments)]
fn hierarchical_inner(
    original: &LossMatrix,
    objective: &Objective,
    ext: SetExtension,
    reference: Option<&ProbVector>,
    stop: &StopRule,
    inner_stop: &StopRule,
    seed: u64,
    depth_left: usize,
    outcomes: &[usize],
) -> Result<HierarchyNode> {
    let restricted = original.restrict_columns(outcomes)?;
    let local_ref = match reference {
        Some(r) => Some(conditional_reference(r, outcomes)?),
        None => None,
    };
    let run = run_origami(
        &restricted,
        objective,
        ext,
        local_ref.as_ref(),
        &stop.clamped(outcomes.len()),
        seed,
    )?;

    let mut children = Vec::with_capacity(run.partition.cell_count());
    for (k, cell) in run.partition.cells().iter().enumerate() {
        // Cell indices are local to the restriction; map back.
        let cell_outcomes: Vec<usize> = cell.iter().map(|&z| outcomes[z]).collect();
        let child = if depth_left > 1 && cell_outcomes.len() >= 2 {
            hierarchical_inner(
                original,
                objective,
                ext,
                reference,
                inner_stop,
                inner_stop,
                substream(seed, (k + 1) as u64),
                depth_left - 1,
                &cell_outcomes,
            )?
        } else {
            HierarchyNode {
                outcomes: cell_outcomes,
                tree: None,
                children: Vec::new(),
            }
        };
        children.push(child);
    }

    Ok(HierarchyNode {
        outcomes: outcomes.to_vec(),
        tree: Some(run.tree),
        children,
    })
}

/// Condition a reference distribution on a subset of outcomes; a zero-mass
/// subset becomes uniform.
fn conditional_reference(reference: &ProbVector, outcomes: &[usize]) -> Result<ProbVector> {
    let mut entries: Vec<f64> = outcomes
        .iter()
        .map(|&z| reference.get(z).unwrap_or(0.0))
        .collect();
    let mass: f64 = entries.iter().sum();
    if mass <= 0.0 {
        return ProbVector::uniform(outcomes.len());
    }
    for x in entries.iter_mut() {
        *x /= mass;
    }
    ProbVector::new(entries)
}
