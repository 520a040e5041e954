//! Comparison algorithms: Max-Min Ant System and a steady-state genetic
//! algorithm over the same gene encoding.

pub mod ga;
pub mod mmas;
pub mod operators;

pub use ga::{run_ga, GaConfig};
pub use mmas::{mmas_bounds, run_mmas, MmasConfig};
