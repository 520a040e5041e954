use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::geo::{travel_time, GeoPoint, DEFAULT_SPEED_KPH};
use super::solution::{Gene, GeneKind};
use crate::error::{Error, Result};

pub const DEFAULT_DAY_START: f64 = 480.0;
pub const DEFAULT_DAY_END: f64 = 1140.0;

/// Inclusive service window in minutes from midnight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub id: String,
    pub location: GeoPoint,
    pub service_minutes: f64,
    pub window: Option<TimeWindow>,
}

/// A vehicle-day shift starting and ending at its depot.
#[derive(Debug, Clone, PartialEq)]
pub struct Vehicle {
    pub id: String,
    pub depot: GeoPoint,
}

/// A validated problem instance.
///
/// Gene `g < n_vehicles` is vehicle `g`; gene `n_vehicles + j` is job `j`.
/// Travel times between all gene locations are cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    vehicles: Vec<Vehicle>,
    jobs: Vec<Job>,
    speed_kph: f64,
    day_start: f64,
    day_end: f64,
    total_service: f64,
    travel: Vec<f64>,
}

impl Instance {
    pub fn new(
        vehicles: Vec<Vehicle>,
        jobs: Vec<Job>,
        speed_kph: f64,
        day_start: f64,
        day_end: f64,
    ) -> Result<Self> {
        if vehicles.is_empty() {
            return Err(Error::Load("instance needs at least one vehicle".into()));
        }
        if !(speed_kph.is_finite() && speed_kph > 0.0) {
            return Err(Error::Load(format!("speed_kph must be positive, got {speed_kph}")));
        }
        if !(day_start.is_finite() && day_end.is_finite() && day_start < day_end) {
            return Err(Error::Load(format!(
                "working day [{day_start}, {day_end}] is empty"
            )));
        }

        let mut seen = HashSet::new();
        for v in &vehicles {
            v.depot
                .check()
                .map_err(|e| Error::Load(format!("vehicle {}: {e}", v.id)))?;
            if !seen.insert(v.id.as_str()) {
                return Err(Error::Load(format!("duplicate id {}", v.id)));
            }
        }
        for job in &jobs {
            job.location
                .check()
                .map_err(|e| Error::Load(format!("job {}: {e}", job.id)))?;
            if !seen.insert(job.id.as_str()) {
                return Err(Error::Load(format!("duplicate id {}", job.id)));
            }
            check_job(job, day_start, day_end)?;
        }

        let total_service = jobs.iter().map(|j| j.service_minutes).sum();

        let points: Vec<GeoPoint> = vehicles
            .iter()
            .map(|v| v.depot)
            .chain(jobs.iter().map(|j| j.location))
            .collect();
        let n = points.len();
        let mut travel = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let t = travel_time(points[i], points[j], speed_kph)?;
                travel[i * n + j] = t;
                travel[j * n + i] = t;
            }
        }

        Ok(Instance {
            vehicles,
            jobs,
            speed_kph,
            day_start,
            day_end,
            total_service,
            travel,
        })
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn n_vehicles(&self) -> usize {
        self.vehicles.len()
    }

    pub fn n_jobs(&self) -> usize {
        self.jobs.len()
    }

    pub fn n_genes(&self) -> usize {
        self.vehicles.len() + self.jobs.len()
    }

    pub fn speed_kph(&self) -> f64 {
        self.speed_kph
    }

    pub fn day_start(&self) -> f64 {
        self.day_start
    }

    pub fn day_end(&self) -> f64 {
        self.day_end
    }

    /// Total job service time `S`.
    pub fn total_service(&self) -> f64 {
        self.total_service
    }

    pub fn vehicle_gene(&self, vehicle: usize) -> Gene {
        debug_assert!(vehicle < self.vehicles.len());
        Gene::from_index(vehicle)
    }

    pub fn job_gene(&self, job: usize) -> Gene {
        debug_assert!(job < self.jobs.len());
        Gene::from_index(self.vehicles.len() + job)
    }

    pub fn kind(&self, gene: Gene) -> GeneKind {
        let g = gene.index();
        if g < self.vehicles.len() {
            GeneKind::Vehicle(g)
        } else {
            GeneKind::Job(g - self.vehicles.len())
        }
    }

    pub fn is_vehicle(&self, gene: Gene) -> bool {
        gene.index() < self.vehicles.len()
    }

    pub fn location(&self, gene: Gene) -> GeoPoint {
        match self.kind(gene) {
            GeneKind::Vehicle(v) => self.vehicles[v].depot,
            GeneKind::Job(j) => self.jobs[j].location,
        }
    }

    /// Cached driving minutes between the locations of two genes.
    #[inline]
    pub fn travel(&self, a: Gene, b: Gene) -> f64 {
        self.travel[a.index() * self.n_genes() + b.index()]
    }

    #[inline]
    pub(crate) fn travel_idx(&self, a: usize, b: usize) -> f64 {
        self.travel[a * (self.vehicles.len() + self.jobs.len()) + b]
    }

    /// `V:<id>` or `J:<id>`.
    pub fn label(&self, gene: Gene) -> String {
        match self.kind(gene) {
            GeneKind::Vehicle(v) => format!("V:{}", self.vehicles[v].id),
            GeneKind::Job(j) => format!("J:{}", self.jobs[j].id),
        }
    }

    pub fn gene_by_label(&self, label: &str) -> Option<Gene> {
        if let Some(id) = label.strip_prefix("V:") {
            self.vehicles
                .iter()
                .position(|v| v.id == id)
                .map(|v| self.vehicle_gene(v))
        } else if let Some(id) = label.strip_prefix("J:") {
            self.jobs
                .iter()
                .position(|j| j.id == id)
                .map(|j| self.job_gene(j))
        } else {
            None
        }
    }

    pub fn from_json(text: &[u8]) -> Result<Self> {
        load_instance(text)
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = RawInstance {
            speed_kph: self.speed_kph,
            day_start_min: self.day_start,
            day_end_min: self.day_end,
            vehicles: self
                .vehicles
                .iter()
                .map(|v| RawVehicle {
                    id: RawId::Text(v.id.clone()),
                    lat: v.depot.lat,
                    lon: v.depot.lon,
                })
                .collect(),
            jobs: self
                .jobs
                .iter()
                .map(|j| RawJob {
                    id: RawId::Text(j.id.clone()),
                    lat: j.location.lat,
                    lon: j.location.lon,
                    service_min: j.service_minutes,
                    window: j.window.map(|w| [w.start, w.end]),
                })
                .collect(),
        };
        Ok(serde_json::to_string_pretty(&raw)?)
    }
}

fn check_job(job: &Job, day_start: f64, day_end: f64) -> Result<()> {
    if !(job.service_minutes.is_finite() && job.service_minutes > 0.0) {
        return Err(Error::Load(format!(
            "job {}: service_min must be positive, got {}",
            job.id, job.service_minutes
        )));
    }
    if let Some(w) = job.window {
        if !(w.start.is_finite() && w.end.is_finite() && w.start < w.end) {
            return Err(Error::Load(format!(
                "job {}: window [{}, {}] is empty",
                job.id, w.start, w.end
            )));
        }
        let open = w.start.max(day_start);
        let close = w.end.min(day_end);
        if close - open < job.service_minutes {
            return Err(Error::Load(format!(
                "job {}: window [{}, {}] within the working day cannot fit {} service minutes",
                job.id, w.start, w.end, job.service_minutes
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawId {
    Text(String),
    Int(i64),
}

impl RawId {
    fn into_string(self) -> String {
        match self {
            RawId::Text(s) => s,
            RawId::Int(i) => i.to_string(),
        }
    }
}

fn default_speed() -> f64 {
    DEFAULT_SPEED_KPH
}

fn default_day_start() -> f64 {
    DEFAULT_DAY_START
}

fn default_day_end() -> f64 {
    DEFAULT_DAY_END
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    #[serde(default = "default_speed")]
    speed_kph: f64,
    #[serde(default = "default_day_start")]
    day_start_min: f64,
    #[serde(default = "default_day_end")]
    day_end_min: f64,
    vehicles: Vec<RawVehicle>,
    jobs: Vec<RawJob>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVehicle {
    id: RawId,
    lat: f64,
    lon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    id: RawId,
    lat: f64,
    lon: f64,
    service_min: f64,
    #[serde(default)]
    window: Option<[f64; 2]>,
}

/// Parses and validates the JSON instance format.
pub fn load_instance(text: &[u8]) -> Result<Instance> {
    let raw: RawInstance =
        serde_json::from_slice(text).map_err(|e| Error::Load(format!("schema violation: {e}")))?;
    let vehicles = raw
        .vehicles
        .into_iter()
        .map(|v| Vehicle {
            id: v.id.into_string(),
            depot: GeoPoint { lat: v.lat, lon: v.lon },
        })
        .collect();
    let jobs = raw
        .jobs
        .into_iter()
        .map(|j| Job {
            id: j.id.into_string(),
            location: GeoPoint { lat: j.lat, lon: j.lon },
            service_minutes: j.service_min,
            window: j.window.map(|[start, end]| TimeWindow { start, end }),
        })
        .collect();
    Instance::new(vehicles, jobs, raw.speed_kph, raw.day_start_min, raw.day_end_min)
}
