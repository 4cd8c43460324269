//! Linear programming over configuration polytopes.

pub mod config;
pub mod knapsack;
pub mod point;
pub mod separation;
pub mod simplex;

pub use config::{block_lp_optimize, eligible_in, LinearOracle, LpSolution, PolytopeModel};
pub use knapsack::knapsack_fptas;
pub use point::{BlockWitness, ConfigWeights, FractionalPoint};
pub use separation::{separate_block, Separation};
