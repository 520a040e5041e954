//! Metaheuristic solvers for fleet optimisation, modelled as a multi-depot
//! vehicle routing problem with time windows.
//!
//! A schedule is a flat permutation of vehicle and job genes. Each vehicle
//! gene owns the job genes that follow it (cyclically) up to the next
//! vehicle gene. Schedules are scored by `C = (S - s + 1) * L`, where `S` is
//! the total job time, `s` the job time actually serviced and `L` the fleet
//! driving time.
//!
//! Solvers:
//!
//! - [`paco`]: Partial-ACO. Each ant keeps its best solution, retains a
//!   random contiguous part of it and rebuilds the rest with the random
//!   proportional rule. Pheromone is either reconstructed from the ant
//!   population (matrix-free) or kept in an edge matrix.
//! - [`baselines::mmas`]: Max-Min Ant System.
//! - [`baselines::ga`]: steady-state permutation GA.
//!
//! [`bench`] holds the experiment harness used by the `fleet-aco` CLI.

pub mod baselines;
pub mod bench;
pub mod construct;
pub mod error;
pub mod eval;
pub mod model;
pub mod paco;
pub mod pheromone;
pub mod run;

pub use error::{Error, Result};
pub use eval::{evaluate, QualityReport, RouteReport};
pub use model::{Gene, GeneKind, GeoPoint, Instance, Job, Solution, TimeWindow, Vehicle};
pub use run::{RunOutput, RunStats, TracePoint};
