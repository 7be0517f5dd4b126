//! Decision-aware coarsening of finite outcome spaces.
//!
//! A prediction task with many outcomes often feeds a decision with only a
//! few actions. The decision's loss matrix says which outcome distinctions
//! actually matter: outcomes whose loss columns agree are interchangeable to
//! the decision-maker and can be merged without cost. This crate coarsens an
//! outcome space by repeatedly *folding* the probability simplex — merging
//! one pair of outcomes at a time — while tracking exactly how much decision
//! quality each merge gives up.
//!
//! The measuring stick is the H-entropy `H(p) = min_a (L p)`: the expected
//! loss of the best action against a distribution `p`. Folding outcomes
//! `i, j` projects `p` to a smaller simplex and merges the matching loss
//! columns under a [`SetExtension`]; the H-entropy increase this causes is
//! the fold's suboptimality gap. Greedy selection of the cheapest fold, one
//! of three [`objective`] scores per pair, runs until a [`StopRule`] fires
//! and yields a [`FoldTree`] whose frontier is the final [`Partition`].
//!
//! ```
//! use origami::{
//!     run_origami, LossMatrix, Objective, SetExtension, StopRule,
//! };
//!
//! // Two actions over four outcomes; the middle two outcomes price
//! // identically, so merging them is free.
//! let loss = LossMatrix::from_rows(vec![
//!     vec![0.0, 0.4, 0.4, 1.0],
//!     vec![1.0, 0.6, 0.6, 0.2],
//! ])?;
//! let run = run_origami(
//!     &loss,
//!     &Objective::Vertex,
//!     SetExtension::WorstCase,
//!     None,
//!     &StopRule::TargetCells(3),
//!     0,
//! )?;
//! assert_eq!(run.partition.cells(), &[vec![0], vec![1, 2], vec![3]]);
//! # Ok::<(), origami::Error>(())
//! ```
//!
//! Beyond the core fold machinery this crate ships the pieces used to
//! exercise it end to end: a [`surrogate`] regressor that amortizes the
//! Monte Carlo objective for a fixed matrix shape, independent ground-truth
//! [`bench::oracle`]s, and seeded benchmark simulations ([`bench::pipeline`],
//! [`bench::active`]) whose comparisons are paired per seed.

pub mod bench;
pub mod ccp;
mod error;
pub mod io;
pub mod loss;
pub mod lp;
pub mod nn;
pub mod objective;
pub mod seed;
pub mod simplex;
pub mod surrogate;
pub mod tree;

pub use ccp::{ccp_max_increase, CcpConfig, CcpOutcome, CcpState};
pub use error::{Error, Result};
pub use loss::{subopt_gap, uniform_loss_matrix, FoldedLoss, LossMatrix};
pub use lp::{solve_lp, LinearProgram, LpSolution};
pub use objective::{
    find_best_fold, integral_objective, integral_objective_matrix, pair_count,
    vertex_objective, vertex_objective_matrix, MCEstimate, Objective, ObjectiveMatrix,
};
pub use simplex::{sample_simplex, Fold, ProbVector, SetExtension};
pub use surrogate::{
    bench_fold_latency, evaluate_surrogate, generate_surrogate_dataset, train_surrogate,
    SurrogateDataset, SurrogateModel, TrainConfig,
};
pub use tree::{
    cumulative_gap, hierarchical_origami, project_dataset, run_origami, FoldTree,
    HierarchyNode, Merge, OrigamiRun, Partition, StopRule,
};
