//! Submodular maximization over multiple-knapsack constraints.
//!
//! Items carry one weight per knapsack constraint, each constraint owns a set
//! of bins, and a solution is a set of items together with a feasible
//! assignment of the selected items into the bins of every constraint. An
//! optional matroid-style constraint (uniform or partition) further restricts
//! the selected set.

pub mod association;
pub mod error;
pub mod exact;
pub mod generate;
pub mod grouping;
pub mod hull;
pub mod instance;
pub mod io;
pub mod lp;
pub mod num;
pub mod oracles;
pub mod rng;
pub mod rounding;
pub mod solver;
pub mod structuring;

pub use error::{Error, Result};
pub use hull::AdditionalConstraint;
pub use instance::{Assignment, Block, Instance, ItemId, Knapsack, Solution};
pub use oracles::{Objective, ObjectiveFlags, SetFunction};
pub use solver::SolverConfig;
