//! Problem data: locations, jobs, vehicles, gene-sequence solutions and
//! synthetic instance generation.

mod generator;
mod geo;
mod instance;
mod solution;

pub use generator::{generate_instance, BoundingBox, GeneratorSpec, Scenario, SCENARIOS};
pub use geo::{haversine_km, travel_time, GeoPoint, DEFAULT_SPEED_KPH, EARTH_RADIUS_KM};
pub use instance::{
    load_instance, Instance, Job, TimeWindow, Vehicle, DEFAULT_DAY_END, DEFAULT_DAY_START,
};
pub use solution::{validate_solution, Gene, GeneKind, Solution, Violation};

#[cfg(test)]
pub(crate) use solution::tests::{figure_instance, seq};
