//! Oracles and desk-scale benchmark simulations.
//!
//! [`oracle`] holds the independent ground-truth routines (lattice
//! quadrature, exhaustive partition search) the estimators are verified
//! against; [`world`] and [`pipeline`] simulate an end-to-end spatial
//! decision task; [`active`] runs a small active-learning loop; [`stats`]
//! carries the shared statistical machinery. All comparative claims are
//! paired per seed.

pub mod active;
pub mod oracle;
pub mod pipeline;
pub mod predictor;
pub mod stats;
pub mod world;
