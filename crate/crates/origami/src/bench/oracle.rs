//! Independent oracles the fast paths are tested against.
//!
//! These deliberately share no code with the estimators they check: the
//! quadrature oracle averages over a deterministic lattice instead of Monte
//! Carlo samples, and the partition search scores covers directly instead of
//! replaying fold trees.

use crate::error::{Error, Result};
use crate::loss::LossMatrix;
use crate::simplex::{Fold, ProbVector, SetExtension};
use crate::tree::Partition;

/// Largest outcome count the lattice oracle accepts; the lattice size grows
/// as `C(m + C - 1, C - 1)` and is only meant for desk-size ground truth.
pub const MAX_QUADRATURE_DIM: usize = 4;

/// Largest outcome count the exhaustive partition search accepts.
pub const MAX_EXHAUSTIVE_DIM: usize = 8;

fn lattice_resolution(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidArgument(format!("bad lattice step {step}")));
    }
    let m = (1.0 / step).round();
    if (m * step - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "step {step} does not divide 1"
        )));
    }
    Ok(m as usize)
}

/// Visit every lattice point of the simplex with denominator `m`.
fn for_each_lattice_point(m: usize, dim: usize, f: &mut impl FnMut(&[usize])) {
    let mut parts = vec![0usize; dim];
    fill(0, m, dim, &mut parts, f);

    fn fill(
        index: usize,
        remaining: usize,
        dim: usize,
        parts: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if index == dim - 1 {
            parts[index] = remaining;
            f(parts);
            return;
        }
        for v in 0..=remaining {
            parts[index] = v;
            fill(index + 1, remaining - v, dim, parts, f);
        }
    }
}

/// Which points of the composition lattice to visit.
#[derive(Clone, Copy, PartialEq)]
enum LatticeKind {
    /// Cell-centered interior points `(k + 1/2) / (m + C/2)`. The plain
    /// vertex lattice overweights the simplex boundary and biases averages
    /// by `O(step)`; the offset grid removes that leading term.
    Centered,
    /// Vertex points `k / m`, boundary included; right for maxima, whose
    /// candidates often sit on faces.
    Vertex,
}

fn lattice_gaps(
    loss: &LossMatrix,
    fold: Fold,
    ext: SetExtension,
    step: f64,
    kind: LatticeKind,
    mut visit: impl FnMut(f64),
) -> Result<()> {
    let dim = loss.outcome_count();
    if dim > MAX_QUADRATURE_DIM {
        return Err(Error::InvalidArgument(format!(
            "lattice oracle supports up to {MAX_QUADRATURE_DIM} outcomes, got {dim}"
        )));
    }
    fold.check_dim(dim)?;
    let m = lattice_resolution(step)?;
    let fixed_folded = if ext.needs_weights() {
        None
    } else {
        Some(loss.fold(fold, ext, None)?.matrix)
    };

    let denom = match kind {
        LatticeKind::Centered => m as f64 + 0.5 * dim as f64,
        LatticeKind::Vertex => m as f64,
    };
    let offset = match kind {
        LatticeKind::Centered => 0.5,
        LatticeKind::Vertex => 0.0,
    };
    let mut error: Option<Error> = None;
    for_each_lattice_point(m, dim, &mut |parts| {
        if error.is_some() {
            return;
        }
        let entries: Vec<f64> = parts
            .iter()
            .map(|&k| (k as f64 + offset) / denom)
            .collect();
        let result = (|| -> Result<f64> {
            let p = ProbVector::new(entries)?;
            let before = loss.h_entropy(&p)?;
            let q = p.fold(fold)?;
            let after = match &fixed_folded {
                Some(matrix) => matrix.h_entropy(&q)?,
                None => loss.fold(fold, ext, Some(&p))?.matrix.h_entropy(&q)?,
            };
            Ok(after - before)
        })();
        match result {
            Ok(gap) => visit(gap),
            Err(e) => error = Some(e),
        }
    });
    match error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// Deterministic lattice average of the fold gap over the simplex: the
/// ground truth the Monte Carlo integral objective is checked against.
/// Cell-centered points, so the boundary is not overweighted.
pub fn grid_quadrature_gap(
    loss: &LossMatrix,
    fold: Fold,
    ext: SetExtension,
    step: f64,
) -> Result<f64> {
    let mut total = 0.0;
    let mut count = 0usize;
    lattice_gaps(loss, fold, ext, step, LatticeKind::Centered, |gap| {
        total += gap;
        count += 1;
    })?;
    Ok(total / count as f64)
}

/// Lattice maximum of the fold gap over the vertex grid (faces included):
/// a lower-bound reference for the concave-convex search.
pub fn grid_max_gap(
    loss: &LossMatrix,
    fold: Fold,
    ext: SetExtension,
    step: f64,
) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    lattice_gaps(loss, fold, ext, step, LatticeKind::Vertex, |gap| {
        if gap > best {
            best = gap;
        }
    })?;
    Ok(best)
}

/// Exact maximum of the fold gap over the simplex, for small dimensions.
///
/// The gap `min_a(folded L . f(p)) - min_a(L . p)` is piecewise linear, so
/// its maximum sits at a vertex of the arrangement cut by the action-tie
/// hyperplanes of the two terms and the simplex facets. Enumerating every
/// choice of `C - 1` of those constraints together with the unit-mass
/// equality visits all arrangement vertices; unlike a lattice search, the
/// result is not biased low, so it can certify an upper bound.
pub fn exact_max_gap(loss: &LossMatrix, fold: Fold, ext: SetExtension) -> Result<f64> {
    let dim = loss.outcome_count();
    if dim > MAX_QUADRATURE_DIM {
        return Err(Error::InvalidArgument(format!(
            "exact oracle supports up to {MAX_QUADRATURE_DIM} outcomes, got {dim}"
        )));
    }
    if ext.needs_weights() {
        // Preserved exactly; the supremum is zero.
        return Ok(0.0);
    }
    fold.check_dim(dim)?;
    let folded = loss.fold(fold, ext, None)?.matrix;
    let actions = loss.action_count();

    // Row a of `composed` satisfies composed[a] . p = (folded row a) . f(p).
    let composed: Vec<Vec<f64>> = (0..actions)
        .map(|a| {
            (0..dim)
                .map(|z| {
                    let col = fold.relabel(z).unwrap_or_else(|| fold.merged_index());
                    folded.entry(a, col)
                })
                .collect()
        })
        .collect();

    let gap_at = |p: &[f64]| -> f64 {
        let before = loss
            .rows()
            .map(|row| row.iter().zip(p).map(|(l, q)| l * q).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let after = composed
            .iter()
            .map(|row| row.iter().zip(p).map(|(l, q)| l * q).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        after - before
    };

    // Constraint normals (through the origin after subtracting the
    // unit-mass equality): facets and action ties of both terms.
    let mut normals: Vec<Vec<f64>> = Vec::new();
    for i in 0..dim {
        let mut facet = vec![0.0; dim];
        facet[i] = 1.0;
        normals.push(facet);
    }
    for rows in [&loss.rows().map(|r| r.to_vec()).collect::<Vec<_>>(), &composed] {
        for a in 0..actions {
            for b in (a + 1)..actions {
                normals.push(
                    rows[a]
                        .iter()
                        .zip(&rows[b])
                        .map(|(x, y)| x - y)
                        .collect(),
                );
            }
        }
    }

    let mut best = f64::NEG_INFINITY;
    // Simplex vertices are always candidates.
    for i in 0..dim {
        let mut p = vec![0.0; dim];
        p[i] = 1.0;
        best = best.max(gap_at(&p));
    }
    // Every subset of C-1 constraints plus the mass equality.
    let mut chosen = Vec::with_capacity(dim - 1);
    enumerate_subsets(&normals, dim - 1, 0, &mut chosen, &mut |subset| {
        if let Some(p) = solve_on_simplex(subset, dim) {
            if p.iter().all(|&x| x >= -1e-9) {
                let total: f64 = p.iter().sum();
                let p: Vec<f64> = p.iter().map(|&x| (x.max(0.0)) / total).collect();
                best = best.max(gap_at(&p));
            }
        }
    });
    Ok(best)
}

fn enumerate_subsets<'a>(
    normals: &'a [Vec<f64>],
    want: usize,
    start: usize,
    chosen: &mut Vec<&'a [f64]>,
    f: &mut impl FnMut(&[&[f64]]),
) {
    if chosen.len() == want {
        f(chosen);
        return;
    }
    for k in start..normals.len() {
        chosen.push(&normals[k]);
        enumerate_subsets(normals, want, k + 1, chosen, f);
        chosen.pop();
    }
}

/// Solve `n . p = 0` for each chosen normal plus `sum p = 1` by Gaussian
/// elimination; `None` for singular systems.
fn solve_on_simplex(normals: &[&[f64]], dim: usize) -> Option<Vec<f64>> {
    let mut a = vec![0.0; dim * dim];
    let mut b = vec![0.0; dim];
    for (r, n) in normals.iter().enumerate() {
        a[r * dim..(r + 1) * dim].copy_from_slice(n);
    }
    for c in 0..dim {
        a[(dim - 1) * dim + c] = 1.0;
    }
    b[dim - 1] = 1.0;

    for col in 0..dim {
        let pivot = (col..dim).max_by(|&r, &s| {
            a[r * dim + col].abs().total_cmp(&a[s * dim + col].abs())
        })?;
        if a[pivot * dim + col].abs() < 1e-12 {
            return None;
        }
        if pivot != col {
            for k in 0..dim {
                a.swap(col * dim + k, pivot * dim + k);
            }
            b.swap(col, pivot);
        }
        let p = a[col * dim + col];
        for r in 0..dim {
            if r != col {
                let factor = a[r * dim + col] / p;
                if factor != 0.0 {
                    for k in col..dim {
                        a[r * dim + k] -= factor * a[col * dim + k];
                    }
                    b[r] -= factor * b[col];
                }
            }
        }
    }
    Some((0..dim).map(|r| b[r] / a[r * dim + r]).collect())
}

/// Mean gap of a partition over a probe, scored straight through the cover.
pub fn partition_gap(
    loss: &LossMatrix,
    partition: &Partition,
    probe: &[ProbVector],
    ext: SetExtension,
) -> Result<f64> {
    if probe.is_empty() {
        return Err(Error::InvalidArgument("empty probe".into()));
    }
    if ext.needs_weights() {
        // Weighted merges need per-sample weights; score per sample.
        let mut total = 0.0;
        for p in probe {
            let before = loss.h_entropy(p)?;
            let after = weighted_cover_entropy(loss, partition, p)?;
            total += after - before;
        }
        return Ok(total / probe.len() as f64);
    }
    let projected = partition.project_loss(loss, ext)?;
    let mut total = 0.0;
    for p in probe {
        let before = loss.h_entropy(p)?;
        let after = projected.h_entropy(&partition.project_prob(p)?)?;
        total += after - before;
    }
    Ok(total / probe.len() as f64)
}

fn weighted_cover_entropy(
    loss: &LossMatrix,
    partition: &Partition,
    p: &ProbVector,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for a in 0..loss.action_count() {
        let mut value = 0.0;
        for cell in partition.cells() {
            let mass: f64 = cell.iter().map(|&z| p.entries()[z]).sum();
            let merged = if mass > 0.0 {
                cell.iter()
                    .map(|&z| loss.entry(a, z) * p.entries()[z])
                    .sum::<f64>()
                    / mass
            } else {
                cell.iter()
                    .map(|&z| loss.entry(a, z))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            value += merged * mass;
        }
        if value < best {
            best = value;
        }
    }
    Ok(best)
}

/// Enumerate every partition of the outcomes into exactly `cell_count`
/// cells, score each over the probe, and return the best (first in
/// enumeration order on ties, which is lexicographic in the assignment
/// vector).
pub fn exhaustive_partition_search(
    loss: &LossMatrix,
    cell_count: usize,
    probe: &[ProbVector],
    ext: SetExtension,
) -> Result<(Partition, f64)> {
    let dim = loss.outcome_count();
    if dim > MAX_EXHAUSTIVE_DIM {
        return Err(Error::InvalidArgument(format!(
            "exhaustive search supports up to {MAX_EXHAUSTIVE_DIM} outcomes, got {dim}"
        )));
    }
    if cell_count == 0 || cell_count > dim {
        return Err(Error::InvalidArgument(format!(
            "cannot split {dim} outcomes into {cell_count} cells"
        )));
    }
    if probe.is_empty() {
        return Err(Error::InvalidArgument("empty probe".into()));
    }

    let mut best: Option<(Partition, f64)> = None;
    let mut assignment = vec![0usize; dim];
    enumerate(1, 1, dim, cell_count, &mut assignment, &mut |assign| {
        let mut cells: Vec<Vec<usize>> = vec![Vec::new(); cell_count];
        for (z, &c) in assign.iter().enumerate() {
            cells[c].push(z);
        }
        let partition = Partition::new(cells)?;
        let gap = partition_gap(loss, &partition, probe, ext)?;
        if best.as_ref().map(|(_, g)| gap < *g).unwrap_or(true) {
            best = Some((partition, gap));
        }
        Ok(())
    })?;
    Ok(best.expect("at least one partition"))
}

/// Restricted-growth enumeration of assignments using exactly `cells` cells.
fn enumerate(
    index: usize,
    used: usize,
    dim: usize,
    cells: usize,
    assignment: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if index == dim {
        if used == cells {
            f(assignment)?;
        }
        return Ok(());
    }
    // Not enough positions left to open the remaining cells?
    if cells - used > dim - index {
        return Ok(());
    }
    for c in 0..used.min(cells) {
        assignment[index] = c;
        enumerate(index + 1, used, dim, cells, assignment, f)?;
    }
    if used < cells {
        assignment[index] = used;
        enumerate(index + 1, used + 1, dim, cells, assignment, f)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simplex::sample_simplex;

    fn fig_loss() -> LossMatrix {
        LossMatrix::from_rows(vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn quadrature_zero_for_identical_columns() {
        let loss =
            LossMatrix::from_rows(vec![vec![0.4, 0.4, 0.9], vec![0.1, 0.1, 0.6]]).unwrap();
        let gap = grid_quadrature_gap(
            &loss,
            Fold::new(0, 1).unwrap(),
            SetExtension::WorstCase,
            0.05,
        )
        .unwrap();
        assert!(gap.abs() < 1e-15);
    }

    #[test]
    fn quadrature_converges_under_step_halving() {
        let loss = fig_loss();
        let fold = Fold::new(0, 1).unwrap();
        let coarse =
            grid_quadrature_gap(&loss, fold, SetExtension::WorstCase, 0.01).unwrap();
        let fine =
            grid_quadrature_gap(&loss, fold, SetExtension::WorstCase, 0.005).unwrap();
        assert!((coarse - fine).abs() < 1e-4, "coarse {coarse}, fine {fine}");
    }

    #[test]
    fn quadrature_reference_value_is_frozen() {
        // Regression pin for the worked two-action example at step 0.005.
        // The exact simplex average of this gap is 1/12; the residual is the
        // rule's remaining discretization error.
        let loss = fig_loss();
        let v = grid_quadrature_gap(
            &loss,
            Fold::new(0, 1).unwrap(),
            SetExtension::WorstCase,
            0.005,
        )
        .unwrap();
        assert!((v - 0.08333024702788903).abs() < 1e-15, "value {v}");
        assert!((v - 1.0 / 12.0).abs() < 1e-5);
    }

    #[test]
    fn quadrature_rejects_large_dims_and_bad_steps() {
        let loss = LossMatrix::from_rows(vec![vec![0.0; 5]]).unwrap();
        assert!(grid_quadrature_gap(
            &loss,
            Fold::new(0, 1).unwrap(),
            SetExtension::WorstCase,
            0.1
        )
        .is_err());
        let small = fig_loss();
        assert!(grid_quadrature_gap(
            &small,
            Fold::new(0, 1).unwrap(),
            SetExtension::WorstCase,
            0.3
        )
        .is_err());
    }

    #[test]
    fn grid_max_dominates_grid_mean() {
        let loss = fig_loss();
        for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let fold = Fold::new(i, j).unwrap();
            let mean =
                grid_quadrature_gap(&loss, fold, SetExtension::WorstCase, 0.02).unwrap();
            let max = grid_max_gap(&loss, fold, SetExtension::WorstCase, 0.02).unwrap();
            assert!(max >= mean - 1e-12);
        }
    }

    #[test]
    fn exhaustive_singletons_have_zero_gap() {
        let loss = fig_loss();
        let probe = sample_simplex(100, 3, 2).unwrap();
        let (partition, gap) =
            exhaustive_partition_search(&loss, 3, &probe, SetExtension::WorstCase).unwrap();
        assert_eq!(partition.cell_count(), 3);
        assert!(gap.abs() < 1e-12);
    }

    #[test]
    fn exhaustive_merges_duplicate_columns_first() {
        // Columns 0 and 2 identical; any other merge costs something.
        let loss = LossMatrix::from_rows(vec![
            vec![0.2, 0.9, 0.2, 0.55],
            vec![0.8, 0.1, 0.8, 0.45],
        ])
        .unwrap();
        let probe = sample_simplex(200, 4, 4).unwrap();
        let (partition, gap) =
            exhaustive_partition_search(&loss, 3, &probe, SetExtension::WorstCase).unwrap();
        assert!(gap.abs() < 1e-12);
        assert!(partition.cells().contains(&vec![0, 2]));
    }

    #[test]
    fn enumeration_counts_match_stirling_numbers() {
        // S(5, 2) = 15, S(5, 3) = 25.
        for (cells, expected) in [(2usize, 15usize), (3, 25)] {
            let mut count = 0;
            let mut assignment = vec![0usize; 5];
            enumerate(1, 1, 5, cells, &mut assignment, &mut |_| {
                count += 1;
                Ok(())
            })
            .unwrap();
            assert_eq!(count, expected);
        }
    }

    #[test]
    fn exhaustive_rejects_oversized_instances() {
        let loss = LossMatrix::from_rows(vec![vec![0.0; 9]]).unwrap();
        let probe = sample_simplex(5, 9, 1).unwrap();
        assert!(
            exhaustive_partition_search(&loss, 2, &probe, SetExtension::WorstCase).is_err()
        );
    }
}
