use serde::Serialize;

use crate::model::Instance;

/// Outcome of driving one vehicle through its job list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RouteReport {
    pub vehicle: String,
    pub visited: Vec<String>,
    pub serviced: Vec<String>,
    pub missed: Vec<String>,
    /// Service start time of each entry of `serviced`.
    pub service_start: Vec<f64>,
    pub depart_time: Option<f64>,
    pub return_time: Option<f64>,
    pub traversal_minutes: f64,
}

/// Incremental route simulation shared by the fast quality path and the
/// full report path, so both produce bit-identical numbers.
pub(crate) struct RouteSim<'a> {
    instance: &'a Instance,
    depot: usize,
    position: usize,
    clock: Option<f64>,
    depart: f64,
    pub(crate) traversal: f64,
    pub(crate) serviced: f64,
    pub(crate) missed: usize,
}

impl<'a> RouteSim<'a> {
    pub(crate) fn new(instance: &'a Instance, vehicle: usize) -> Self {
        RouteSim {
            instance,
            depot: vehicle,
            position: vehicle,
            clock: None,
            depart: 0.0,
            traversal: 0.0,
            serviced: 0.0,
            missed: 0,
        }
    }

    /// Attempts job `job`; returns its service start when serviced. A missed
    /// job costs no travel and leaves the vehicle where it was.
    #[inline]
    pub(crate) fn visit(&mut self, job: usize) -> Option<f64> {
        let inst = self.instance;
        let spec = &inst.jobs()[job];
        let target = inst.n_vehicles() + job;
        let leg = inst.travel_idx(self.position, target);

        let (open, close) = match spec.window {
            Some(w) => (w.start.max(inst.day_start()), w.end.min(inst.day_end())),
            None => (inst.day_start(), inst.day_end()),
        };
        let start = match self.clock {
            // not yet departed: leave the depot just in time
            None => open,
            Some(t) => (t + leg).max(open),
        };
        if start + spec.service_minutes <= close {
            if self.clock.is_none() {
                self.depart = start - leg;
            }
            self.traversal += leg;
            self.serviced += spec.service_minutes;
            self.clock = Some(start + spec.service_minutes);
            self.position = target;
            Some(start)
        } else {
            self.missed += 1;
            None
        }
    }

    /// Drives back to the depot. Returns `(depart, return)` if the vehicle
    /// ever left.
    pub(crate) fn finish(&mut self) -> Option<(f64, f64)> {
        let t = self.clock?;
        let back = self.instance.travel_idx(self.position, self.depot);
        self.traversal += back;
        self.position = self.depot;
        Some((self.depart, t + back))
    }
}

/// Simulates `vehicle` servicing `jobs` (job indices) in order.
pub fn simulate_route(instance: &Instance, vehicle: usize, jobs: &[usize]) -> RouteReport {
    simulate(instance, vehicle, jobs).0
}

/// Report plus serviced minutes summed in visiting order.
pub(crate) fn simulate(instance: &Instance, vehicle: usize, jobs: &[usize]) -> (RouteReport, f64) {
    let mut sim = RouteSim::new(instance, vehicle);
    let mut report = RouteReport {
        vehicle: instance.vehicles()[vehicle].id.clone(),
        visited: Vec::with_capacity(jobs.len()),
        serviced: Vec::new(),
        missed: Vec::new(),
        service_start: Vec::new(),
        depart_time: None,
        return_time: None,
        traversal_minutes: 0.0,
    };
    for &job in jobs {
        let id = instance.jobs()[job].id.clone();
        report.visited.push(id.clone());
        match sim.visit(job) {
            Some(start) => {
                report.serviced.push(id);
                report.service_start.push(start);
            }
            None => report.missed.push(id),
        }
    }
    if let Some((depart, ret)) = sim.finish() {
        report.depart_time = Some(depart);
        report.return_time = Some(ret);
    }
    report.traversal_minutes = sim.traversal;
    (report, sim.serviced)
}
