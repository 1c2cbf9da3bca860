//! Stochastic multi-gradient descent for multi-objective problems.
//!
//! The crate is `no_std` (it needs `alloc`) and holds the numerical core:
//!
//! * [`types`]: decision/objective vectors, box regions, dominance, projection.
//! * [`simplex`]: the min-norm point of the convex hull of a set of gradients.
//! * [`problems`]: objective oracles (benchmark suite, noise wrapper, quadratics).
//! * [`smg`]: the stochastic multi-gradient iteration, step schedules,
//!   dynamic batch sizes and the multi-gradient bias harness.
//! * [`pareto`]: nondominated archives and the PF-SMG / PF-MG front drivers.
//! * [`metrics`]: Purity, hole size, point spread and performance profiles.
//! * [`logreg`]: per-group logistic losses for accuracy-fairness trade-offs.
//!
//! File formats, the command line and threading live in the `paretosmg` crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod logreg;
pub mod metrics;
pub mod pareto;
pub mod problems;
pub mod rng;
pub mod simplex;
pub mod smg;
pub mod types;

pub use error::{Error, Result};
pub use types::{BoxRegion, DecisionVector, ObjectiveVector};
