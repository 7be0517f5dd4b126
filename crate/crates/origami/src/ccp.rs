//! Worst-case fold cost via the concave-convex procedure.
//!
//! The max-increase objective asks for the largest H-entropy increase a fold
//! can cause anywhere on the simplex:
//!
//! ```text
//! sup over p of  H_folded(f(p)) - H(p)
//! ```
//!
//! Both terms are concave and piecewise linear in `p`, so this is a
//! difference-of-concave program. Each iteration replaces the subtracted
//! term with its linearization at the current point (a supergradient of `H`
//! is just the loss row of the currently optimal action) and solves the
//! remaining concave problem exactly as a small epigraph LP. The true
//! objective never decreases along the iterates; restarts from fresh uniform
//! points guard against poor local maxima.

use crate::error::Result;
use crate::loss::LossMatrix;
use crate::lp::{solve_lp, LinearProgram, LpSolution};
use crate::seed::substream;
use crate::simplex::{sample_simplex, Fold, ProbVector, SetExtension};

/// Tuning for the concave-convex search.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CcpConfig {
    /// Independent starts from fresh uniform samples.
    pub restarts: usize,
    /// Stop a restart once the true objective improves by less than this.
    pub tolerance: f64,
    /// Hard cap on iterations per restart.
    pub max_iterations: usize,
}

impl Default for CcpConfig {
    fn default() -> Self {
        Self {
            restarts: 5,
            tolerance: 1e-6,
            max_iterations: 100,
        }
    }
}

/// One accepted iterate of a restart.
#[derive(Debug, Clone)]
pub struct CcpState {
    pub iteration: usize,
    /// The iterate itself.
    pub current_point: ProbVector,
    /// The loss row of the action optimal at `current_point`; a
    /// supergradient of the H-entropy there (smallest row index on ties).
    pub supergradient: Vec<f64>,
    /// Optimal value of the linearized problem solved from this point.
    pub surrogate_value: f64,
    /// True objective at this point; non-decreasing along a restart.
    pub true_value: f64,
}

/// Best value found across restarts, with per-restart iterate traces.
#[derive(Debug, Clone)]
pub struct CcpOutcome {
    pub value: f64,
    pub maximizer: ProbVector,
    pub restart_traces: Vec<Vec<CcpState>>,
}

/// Maximize `H_folded(f(p)) - H(p)` over the simplex.
///
/// For the weighted-sum extension the objective is identically zero (the
/// merged column's contribution equals what the two original columns
/// contributed), so the search short-circuits to an exact zero.
pub fn ccp_max_increase(
    loss: &LossMatrix,
    fold: Fold,
    ext: SetExtension,
    cfg: &CcpConfig,
    seed: u64,
) -> Result<CcpOutcome> {
    fold.check_dim(loss.outcome_count())?;
    let dim = loss.outcome_count();

    if ext.needs_weights() {
        return Ok(CcpOutcome {
            value: 0.0,
            maximizer: ProbVector::uniform(dim)?,
            restart_traces: Vec::new(),
        });
    }

    // Compose the folded matrix with the fold's linear map once: row a of
    // `composed` satisfies composed[a] . p = (folded row a) . f(p).
    let folded = loss.fold(fold, ext, None)?.matrix;
    let composed: Vec<Vec<f64>> = (0..loss.action_count())
        .map(|a| {
            (0..dim)
                .map(|z| {
                    let col = fold.relabel(z).unwrap_or_else(|| fold.merged_index());
                    folded.entry(a, col)
                })
                .collect()
        })
        .collect();
    let t_floor = composed
        .iter()
        .flatten()
        .fold(f64::INFINITY, |acc, &v| acc.min(v));

    let true_objective = |p: &ProbVector| -> Result<f64> {
        let after = composed
            .iter()
            .map(|row| dot(row, p.entries()))
            .fold(f64::INFINITY, f64::min);
        Ok(after - loss.h_entropy(p)?)
    };

    let mut best_value = f64::NEG_INFINITY;
    let mut best_point: Option<ProbVector> = None;
    let mut traces = Vec::with_capacity(cfg.restarts);

    for restart in 0..cfg.restarts {
        let mut p = sample_simplex(1, dim, substream(seed, restart as u64))?
            .pop()
            .expect("one sample");
        let mut value = true_objective(&p)?;
        let mut trace = Vec::new();

        for iteration in 0..cfg.max_iterations {
            let action = loss.argmin_action(&p)?;
            let gradient = loss.row(action).to_vec();
            let h_here = loss.h_entropy(&p)?;

            let step = linearized_step(&composed, &gradient, t_floor, dim)?;
            let surrogate_value =
                step.value + t_floor + (dot(&gradient, p.entries()) - h_here);

            trace.push(CcpState {
                iteration,
                current_point: p.clone(),
                supergradient: gradient,
                surrogate_value,
                true_value: value,
            });

            let candidate = ProbVector::new(step.x[..dim].to_vec())?;
            let candidate_value = true_objective(&candidate)?;
            if candidate_value < value {
                // Rounding at a fixed point; the iterate stands.
                break;
            }
            let improvement = candidate_value - value;
            p = candidate;
            value = candidate_value;
            if improvement < cfg.tolerance {
                break;
            }
        }

        if value > best_value {
            best_value = value;
            best_point = Some(p);
        }
        traces.push(trace);
    }

    Ok(CcpOutcome {
        value: best_value,
        maximizer: best_point.expect("at least one restart"),
        restart_traces: traces,
    })
}

/// Maximize `min_a(composed_a . p) - gradient . p` over the simplex, as an
/// LP over `(p, t - t_floor)`.
fn linearized_step(
    composed: &[Vec<f64>],
    gradient: &[f64],
    t_floor: f64,
    dim: usize,
) -> Result<LpSolution> {
    let mut objective = vec![0.0; dim + 1];
    for (c, g) in objective.iter_mut().zip(gradient) {
        *c = -g;
    }
    objective[dim] = 1.0;

    let mut mass = vec![1.0; dim + 1];
    mass[dim] = 0.0;

    let ineq = composed
        .iter()
        .map(|row| {
            let mut coeffs = vec![0.0; dim + 1];
            for (c, r) in coeffs.iter_mut().zip(row) {
                *c = -r;
            }
            coeffs[dim] = 1.0;
            (coeffs, -t_floor)
        })
        .collect();

    solve_lp(&LinearProgram {
        objective,
        eq: vec![(mass, 1.0)],
        ineq,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
