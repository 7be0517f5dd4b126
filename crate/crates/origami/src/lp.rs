//! A dense linear-program solver for the small epigraph problems that arise
//! when maximizing a piecewise-linear concave function over the simplex.
//!
//! Problems here have a handful of variables (one per outcome plus an
//! epigraph scalar) and a handful of constraints (one per action plus the
//! unit-mass equality), so a textbook two-phase tableau with Bland's
//! anti-cycling rule is the right tool: exact pivoting logic, no tuning, and
//! termination is guaranteed.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const FEAS_EPS: f64 = 1e-7;

/// `maximize objective . x` subject to `a . x = b` for each row of `eq`,
/// `a . x <= b` for each row of `ineq`, and `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub ineq: Vec<(Vec<f64>, f64)>,
}

/// An optimal vertex solution.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Solve a small dense LP; errors on infeasible or unbounded input, which in
/// this crate always indicates a bug in the caller's construction.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    let n = lp.objective.len();
    if n == 0 {
        return Err(Error::InvalidArgument("LP with no variables".into()));
    }
    for (row, _) in lp.eq.iter().chain(lp.ineq.iter()) {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                context: "LP constraint row vs objective",
                expected: n,
                actual: row.len(),
            });
        }
    }

    let m = lp.eq.len() + lp.ineq.len();
    let n_slack = lp.ineq.len();

    // Columns: original variables, slacks, then one artificial per row that
    // needs one. Rows are normalized to nonnegative rhs.
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut rhs: Vec<f64> = Vec::with_capacity(m);
    let mut needs_artificial: Vec<bool> = Vec::with_capacity(m);

    for (a, b) in &lp.eq {
        let flip = *b < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n + n_slack];
        for (j, &v) in a.iter().enumerate() {
            row[j] = sign * v;
        }
        rows.push(row);
        rhs.push(sign * b);
        needs_artificial.push(true);
    }
    for (k, (a, b)) in lp.ineq.iter().enumerate() {
        let flip = *b < 0.0;
        let sign = if flip { -1.0 } else { 1.0 };
        let mut row = vec![0.0; n + n_slack];
        for (j, &v) in a.iter().enumerate() {
            row[j] = sign * v;
        }
        row[n + k] = sign; // slack
        rows.push(row);
        rhs.push(sign * b);
        // A flipped inequality row has slack coefficient -1, so the slack
        // cannot seed the basis there.
        needs_artificial.push(flip);
    }

    let n_art: usize = needs_artificial.iter().filter(|&&x| x).count();
    let total = n + n_slack + n_art;
    let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut art_col = n + n_slack;
    for (r, mut row) in rows.into_iter().enumerate() {
        row.resize(total, 0.0);
        if needs_artificial[r] {
            row[art_col] = 1.0;
            basis.push(art_col);
            art_col += 1;
        } else {
            basis.push(n + r - lp.eq.len()); // its own slack
        }
        row.push(rhs[r]);
        tableau.push(row);
    }

    // Phase 1: maximize minus the sum of artificials.
    if n_art > 0 {
        let mut cost = vec![0.0; total];
        for c in cost.iter_mut().skip(n + n_slack) {
            *c = -1.0;
        }
        let allowed = vec![true; total];
        let value = run_simplex(&mut tableau, &mut basis, &cost, &allowed)?;
        if value < -FEAS_EPS {
            return Err(Error::LpInfeasible);
        }
        // Pivot any artificial still sitting in the basis (at level zero)
        // out on a real column; a row with no real pivot is redundant and
        // its artificial stays pinned at zero, barred from re-entering.
        for r in 0..tableau.len() {
            if basis[r] >= n + n_slack {
                if let Some(c) = (0..n + n_slack)
                    .find(|&c| tableau[r][c].abs() > PIVOT_EPS)
                {
                    pivot(&mut tableau, &mut basis, r, c);
                }
            }
        }
    }

    // Phase 2: the real objective, with artificial columns barred.
    let mut cost = vec![0.0; total];
    cost[..n].copy_from_slice(&lp.objective);
    let mut allowed = vec![true; total];
    for a in allowed.iter_mut().skip(n + n_slack) {
        *a = false;
    }
    let value = run_simplex(&mut tableau, &mut basis, &cost, &allowed)?;

    let mut x = vec![0.0; n];
    for (r, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tableau[r][total];
        }
    }
    Ok(LpSolution { x, value })
}

/// Run Bland's-rule simplex to optimality for `maximize cost . x`, returning
/// the optimal objective value. The tableau's basic columns must form an
/// identity on entry.
fn run_simplex(
    tableau: &mut [Vec<f64>],
    basis: &mut [usize],
    cost: &[f64],
    allowed: &[bool],
) -> Result<f64> {
    let total = cost.len();
    loop {
        // Reduced costs from scratch each iteration: the problems are tiny
        // and this avoids drift in an explicitly carried objective row.
        let mut reduced = cost.to_vec();
        for (r, &b) in basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for j in 0..total {
                    reduced[j] -= cb * tableau[r][j];
                }
            }
        }

        // Bland: smallest-index improving column.
        let entering = (0..total)
            .find(|&j| allowed[j] && !basis.contains(&j) && reduced[j] > PIVOT_EPS);
        let Some(col) = entering else {
            let mut value = 0.0;
            for (r, &b) in basis.iter().enumerate() {
                value += cost[b] * tableau[r][total];
            }
            return Ok(value);
        };

        // Ratio test; ties go to the smallest basic variable index.
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..tableau.len() {
            let a = tableau[r][col];
            if a > PIVOT_EPS {
                let ratio = tableau[r][total] / a;
                match leave {
                    None => leave = Some((r, ratio)),
                    Some((br, best)) => {
                        if ratio < best - PIVOT_EPS
                            || (ratio < best + PIVOT_EPS && basis[r] < basis[br])
                        {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leave else {
            return Err(Error::LpUnbounded);
        };
        pivot(tableau, basis, row, col);
    }
}

fn pivot(tableau: &mut [Vec<f64>], basis: &mut [usize], row: usize, col: usize) {
    let width = tableau[row].len();
    let p = tableau[row][col];
    for v in tableau[row].iter_mut() {
        *v /= p;
    }
    for r in 0..tableau.len() {
        if r != row {
            let factor = tableau[r][col];
            if factor != 0.0 {
                let (pivot_row, other) = if row < r {
                    let (a, b) = tableau.split_at_mut(r);
                    (&a[row], &mut b[0])
                } else {
                    let (a, b) = tableau.split_at_mut(row);
                    (&b[0], &mut a[r])
                };
                for (cell, &base) in other.iter_mut().zip(pivot_row.iter()).take(width) {
                    *cell -= factor * base;
                }
            }
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simplex_eq(n: usize) -> (Vec<f64>, f64) {
        (vec![1.0; n], 1.0)
    }

    #[test]
    fn maximize_coordinate_over_simplex() {
        let lp = LinearProgram {
            objective: vec![1.0, 0.0, 0.0],
            eq: vec![simplex_eq(3)],
            ineq: vec![],
        };
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!(sol.x[1].abs() < 1e-9 && sol.x[2].abs() < 1e-9);
    }

    #[test]
    fn zero_objective_over_simplex() {
        let lp = LinearProgram {
            objective: vec![0.0, 0.0, 0.0],
            eq: vec![simplex_eq(3)],
            ineq: vec![],
        };
        let sol = solve_lp(&lp).unwrap();
        assert!(sol.value.abs() < 1e-9);
        let mass: f64 = sol.x.iter().sum();
        assert!((mass - 1.0).abs() < 1e-9);
        assert!(sol.x.iter().all(|&v| v >= -1e-9));
    }

    #[test]
    fn epigraph_of_single_action_fold() {
        // maximize t - p_1 with t <= q_0 = p_0 + p_1 over the simplex,
        // written with t shifted to stay nonnegative. Optimum is p = e_0.
        let lp = LinearProgram {
            objective: vec![0.0, -1.0, 0.0, 1.0],
            eq: vec![(vec![1.0, 1.0, 1.0, 0.0], 1.0)],
            ineq: vec![(vec![-1.0, -1.0, 0.0, 1.0], 0.0)],
        };
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasible() {
        // x <= -1 with x >= 0.
        let lp = LinearProgram {
            objective: vec![1.0],
            eq: vec![],
            ineq: vec![(vec![1.0], -1.0)],
        };
        assert!(matches!(solve_lp(&lp), Err(Error::LpInfeasible)));
    }

    #[test]
    fn detects_unbounded() {
        let lp = LinearProgram {
            objective: vec![1.0],
            eq: vec![],
            ineq: vec![],
        };
        assert!(matches!(solve_lp(&lp), Err(Error::LpUnbounded)));
    }

    #[test]
    fn handles_negative_rhs_inequalities() {
        // -x <= -0.25 means x >= 0.25; maximize -x over the simplex slice.
        let lp = LinearProgram {
            objective: vec![-1.0, 0.0],
            eq: vec![simplex_eq(2)],
            ineq: vec![(vec![-1.0, 0.0], -0.25)],
        };
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.x[0] - 0.25).abs() < 1e-9);
        assert!((sol.value + 0.25).abs() < 1e-9);
    }

    #[test]
    fn degenerate_vertices_terminate() {
        // Redundant constraints force degenerate pivots; Bland must exit.
        let lp = LinearProgram {
            objective: vec![1.0, 1.0, 0.0],
            eq: vec![simplex_eq(3)],
            ineq: vec![
                (vec![1.0, 0.0, 0.0], 1.0),
                (vec![1.0, 0.0, 0.0], 1.0),
                (vec![0.0, 1.0, 0.0], 0.0),
            ],
        };
        let sol = solve_lp(&lp).unwrap();
        assert!((sol.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn matches_vertex_enumeration_on_random_simplex_lps() {
        // maximize c . p over the simplex: the optimum is max_i c_i.
        use rand::Rng as _;
        let mut rng = crate::seed::rng_from_seed(31);
        for _ in 0..50 {
            let n = rng.random_range(2..6);
            let c: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let lp = LinearProgram {
                objective: c.clone(),
                eq: vec![simplex_eq(n)],
                ineq: vec![],
            };
            let sol = solve_lp(&lp).unwrap();
            let best = c.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
            assert!((sol.value - best).abs() < 1e-9);
        }
    }
}
