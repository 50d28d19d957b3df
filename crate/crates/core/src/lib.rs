//! Evolutionary optimization of permutation problems (assignment, multi-objective
//! assignment, travelling salesperson) where the optimizer only sees fitness
//! through an obfuscating privacy layer.
//!
//! * [`problem`]: instances, exact solvers, ground-truth fronts, TSPLIB input.
//! * [`privacy`]: obfuscation methods, fitness estimation and leakage bounds.
//! * [`evolution`]: GA and NSGA-II with the usual permutation operators.
//! * [`metrics`]: quality indicators and paired statistical comparison.

pub mod error;
pub mod evolution;
pub mod metrics;
pub mod pareto;
pub mod privacy;
pub mod problem;

pub use error::{Error, Result};
pub use evolution::{run, Algorithm, EAConfig, RunOptions, RunTrace};
pub use metrics::{MetricKind, MetricValue};
pub use privacy::{ObfuscationMethod, ObfuscationPlan};
pub use problem::{Direction, Permutation, ProblemInstance, ProblemKind, WeightMatrix};
