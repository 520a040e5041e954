//! Emulation of a manual dispatcher's schedule, used as the reference for
//! traversal-time reductions.

use super::encode;
use super::route::simulate;
use crate::model::{Instance, Solution};

/// Nearest-depot assignment with a soft load cap, then furthest job first
/// and nearest neighbour back towards the depot. Jobs with time windows are
/// moved to the earliest position where they get serviced.
pub fn company_baseline(instance: &Instance) -> Solution {
    let nv = instance.n_vehicles();
    let cap = instance.total_service() / nv as f64;
    let mut load = vec![0.0; nv];
    let mut routes: Vec<Vec<usize>> = vec![Vec::new(); nv];

    for (j, job) in instance.jobs().iter().enumerate() {
        let jg = instance.job_gene(j);
        let mut by_distance: Vec<usize> = (0..nv).collect();
        by_distance.sort_by(|&a, &b| {
            let da = instance.travel(instance.vehicle_gene(a), jg);
            let db = instance.travel(instance.vehicle_gene(b), jg);
            da.total_cmp(&db).then(a.cmp(&b))
        });
        let v = by_distance
            .iter()
            .copied()
            .find(|&v| load[v] < cap)
            .unwrap_or(by_distance[0]);
        load[v] += job.service_minutes;
        routes[v].push(j);
    }

    for (v, route) in routes.iter_mut().enumerate() {
        *route = furthest_then_nearest(instance, v, route);
        place_windowed_jobs(instance, v, route);
    }
    encode(instance, &routes)
}

fn furthest_then_nearest(instance: &Instance, vehicle: usize, jobs: &[usize]) -> Vec<usize> {
    let depot = instance.vehicle_gene(vehicle);
    let mut left: Vec<usize> = jobs.to_vec();
    let mut order = Vec::with_capacity(jobs.len());
    let Some(first) = argbest(&left, |j| instance.travel(depot, instance.job_gene(j)), true) else {
        return order;
    };
    let mut current = left.remove(first);
    order.push(current);
    while !left.is_empty() {
        let from = instance.job_gene(current);
        let next = argbest(&left, |j| instance.travel(from, instance.job_gene(j)), false)
            .expect("non-empty");
        current = left.remove(next);
        order.push(current);
    }
    order
}

/// Position of the max (or min) key; ties go to the earlier entry.
fn argbest(items: &[usize], key: impl Fn(usize) -> f64, max: bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &item) in items.iter().enumerate() {
        let k = key(item);
        let better = match best {
            None => true,
            Some((_, b)) => {
                if max {
                    k > b
                } else {
                    k < b
                }
            }
        };
        if better {
            best = Some((i, k));
        }
    }
    best.map(|(i, _)| i)
}

fn place_windowed_jobs(instance: &Instance, vehicle: usize, route: &mut Vec<usize>) {
    let windowed: Vec<usize> = route
        .iter()
        .copied()
        .filter(|&j| instance.jobs()[j].window.is_some())
        .collect();
    for job in windowed {
        let original = route.iter().position(|&j| j == job).expect("job on route");
        route.remove(original);
        let id = &instance.jobs()[job].id;
        // earliest slot that services the job, preferring slots that keep
        // the most service time on the whole route
        let mut best: Option<(usize, f64)> = None;
        for pos in 0..=route.len() {
            let mut trial = route.clone();
            trial.insert(pos, job);
            let (report, serviced) = simulate(instance, vehicle, &trial);
            if report.serviced.iter().any(|s| s == id) && best.is_none_or(|(_, b)| serviced > b) {
                best = Some((pos, serviced));
            }
        }
        route.insert(best.map_or(original, |(pos, _)| pos), job);
    }
}
