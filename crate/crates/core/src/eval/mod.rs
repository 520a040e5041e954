//! Decoding gene sequences into routes and scoring them.

mod baseline;
mod route;

use serde::Serialize;

pub use baseline::company_baseline;
pub use route::{simulate_route, RouteReport};

use crate::error::{Error, Result};
use crate::model::{validate_solution, Gene, Instance, Solution};
use route::RouteSim;

/// Scalar outcome of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quality {
    /// Serviced job minutes `s`.
    pub serviced: f64,
    /// Fleet traversal minutes `L`.
    pub traversal: f64,
    /// `C = (S - s + 1) * L`.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QualityReport {
    #[serde(rename = "S_min")]
    pub total_service: f64,
    #[serde(rename = "s_min")]
    pub serviced: f64,
    #[serde(rename = "L_min")]
    pub traversal: f64,
    #[serde(rename = "C")]
    pub cost: f64,
    pub serviced_pct: f64,
    pub routes: Vec<RouteReport>,
}

impl QualityReport {
    pub fn quality(&self) -> Quality {
        Quality {
            serviced: self.serviced,
            traversal: self.traversal,
            cost: self.cost,
        }
    }

    /// `s / S`; 1 for an instance without jobs.
    pub fn serviced_fraction(&self) -> f64 {
        if self.total_service > 0.0 {
            self.serviced / self.total_service
        } else {
            1.0
        }
    }
}

/// Penalised quality of serviced time `serviced` and driving time `traversal`.
#[inline]
pub fn penalised_cost(total_service: f64, serviced: f64, traversal: f64) -> f64 {
    (total_service - serviced + 1.0) * traversal
}

/// Cyclic decode: each vehicle gene owns the job genes after it, up to the
/// next vehicle gene, wrapping around the end of the sequence. The result is
/// indexed by vehicle and holds job indices.
pub fn decode(instance: &Instance, solution: &Solution) -> Result<Vec<Vec<usize>>> {
    validate_solution(instance, solution).map_err(Error::InvalidSolution)?;
    let mut routes = vec![Vec::new(); instance.n_vehicles()];
    walk(instance, &solution.genes, |vehicle, job| {
        if let Some(job) = job {
            routes[vehicle].push(job);
        }
    });
    Ok(routes)
}

/// Calls `f(vehicle, None)` at each vehicle gene and `f(vehicle, Some(job))`
/// for each job it owns. Starts at vehicle 0, so any rotation of a sequence
/// is walked identically.
#[inline]
fn walk(instance: &Instance, genes: &[Gene], mut f: impl FnMut(usize, Option<usize>)) {
    let n = genes.len();
    let Some(origin) = genes.iter().position(|g| g.index() == 0) else {
        return;
    };
    let nv = instance.n_vehicles();
    let mut vehicle = 0;
    for k in 0..n {
        let g = genes[(origin + k) % n].index();
        if g < nv {
            vehicle = g;
            f(vehicle, None);
        } else {
            f(vehicle, Some(g - nv));
        }
    }
}

/// Hot-path evaluation without validation or per-route reports. The caller
/// guarantees `genes` is a valid permutation.
pub fn quality(instance: &Instance, genes: &[Gene]) -> Quality {
    debug_assert!(validate_solution(instance, &Solution::new(genes.to_vec())).is_ok());
    let mut serviced = 0.0;
    let mut traversal = 0.0;
    let mut missed = 0;
    let mut sim: Option<RouteSim> = None;
    walk(instance, genes, |vehicle, job| match job {
        None => {
            if let Some(mut done) = sim.replace(RouteSim::new(instance, vehicle)) {
                done.finish();
                serviced += done.serviced;
                traversal += done.traversal;
                missed += done.missed;
            }
        }
        Some(job) => {
            sim.as_mut().expect("walk starts at a vehicle").visit(job);
        }
    });
    if let Some(mut done) = sim {
        done.finish();
        serviced += done.serviced;
        traversal += done.traversal;
        missed += done.missed;
    }
    finish_quality(instance, serviced, traversal, missed)
}

fn finish_quality(instance: &Instance, serviced: f64, traversal: f64, missed: usize) -> Quality {
    // exact when nothing is missed, whatever the summation order
    let serviced = if missed == 0 { instance.total_service() } else { serviced };
    Quality {
        serviced,
        traversal,
        cost: penalised_cost(instance.total_service(), serviced, traversal),
    }
}

/// Full evaluation with per-vehicle route reports.
pub fn evaluate(instance: &Instance, solution: &Solution) -> Result<QualityReport> {
    validate_solution(instance, solution).map_err(Error::InvalidSolution)?;
    let mut routes: Vec<Vec<usize>> = vec![Vec::new(); instance.n_vehicles()];
    let mut order = Vec::with_capacity(instance.n_vehicles());
    walk(instance, &solution.genes, |vehicle, job| match job {
        None => order.push(vehicle),
        Some(job) => routes[vehicle].push(job),
    });

    let (reports, route_serviced): (Vec<RouteReport>, Vec<f64>) = routes
        .iter()
        .enumerate()
        .map(|(v, jobs)| route::simulate(instance, v, jobs))
        .unzip();

    // accumulate in walk order to match `quality` bit for bit
    let mut serviced = 0.0;
    let mut traversal = 0.0;
    let mut missed = 0;
    for &v in &order {
        let r = &reports[v];
        serviced += route_serviced[v];
        traversal += r.traversal_minutes;
        missed += r.missed.len();
    }
    let q = finish_quality(instance, serviced, traversal, missed);
    let total = instance.total_service();
    Ok(QualityReport {
        total_service: total,
        serviced: q.serviced,
        traversal: q.traversal,
        cost: q.cost,
        serviced_pct: if total > 0.0 { 100.0 * q.serviced / total } else { 100.0 },
        routes: reports,
    })
}

/// Builds a vehicle-first gene sequence from per-vehicle job lists.
pub fn encode(instance: &Instance, routes: &[Vec<usize>]) -> Solution {
    let mut genes = Vec::with_capacity(instance.n_genes());
    for (v, jobs) in routes.iter().enumerate() {
        genes.push(instance.vehicle_gene(v));
        genes.extend(jobs.iter().map(|&j| instance.job_gene(j)));
    }
    Solution::new(genes)
}
