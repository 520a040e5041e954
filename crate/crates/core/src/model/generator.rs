use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::geo::{GeoPoint, DEFAULT_SPEED_KPH};
use super::instance::{Instance, Job, TimeWindow, Vehicle, DEFAULT_DAY_END, DEFAULT_DAY_START};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

impl Default for BoundingBox {
    /// Roughly 17 x 17 km around central Birmingham.
    fn default() -> Self {
        BoundingBox {
            min_lat: 52.40,
            max_lat: 52.55,
            min_lon: -2.02,
            max_lon: -1.77,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub n_vehicles: usize,
    pub n_jobs: usize,
    pub bbox: BoundingBox,
    /// Inclusive range of raw service durations before rescaling.
    pub service_minutes_range: (f64, f64),
    pub window_fraction: f64,
    pub target_total_service: Option<f64>,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(n_vehicles: usize, n_jobs: usize, seed: u64) -> Self {
        GeneratorSpec {
            n_vehicles,
            n_jobs,
            bbox: BoundingBox::default(),
            service_minutes_range: (15.0, 60.0),
            window_fraction: 0.1,
            target_total_service: None,
            seed,
        }
    }

    fn check(&self) -> Result<()> {
        if self.n_vehicles == 0 || self.n_jobs == 0 {
            return Err(Error::InvalidSpec("vehicle and job counts must be positive".into()));
        }
        let b = &self.bbox;
        if !(b.min_lat < b.max_lat && b.min_lon < b.max_lon) {
            return Err(Error::InvalidSpec(format!("empty bounding box {b:?}")));
        }
        GeoPoint::new(b.min_lat, b.min_lon).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        GeoPoint::new(b.max_lat, b.max_lon).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        let (lo, hi) = self.service_minutes_range;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::InvalidSpec(format!(
                "service range ({lo}, {hi}) must satisfy 0 < min <= max"
            )));
        }
        if !(0.0..=1.0).contains(&self.window_fraction) {
            return Err(Error::InvalidSpec(format!(
                "window_fraction {} outside [0, 1]",
                self.window_fraction
            )));
        }
        if let Some(t) = self.target_total_service {
            if !(t.is_finite() && t >= self.n_jobs as f64) {
                return Err(Error::InvalidSpec(format!(
                    "target_total_service {t} must allow at least one minute per job"
                )));
            }
        }
        Ok(())
    }
}

/// Builds a synthetic instance. Service durations and windows are whole
/// minutes; the same spec always yields the same instance.
pub fn generate_instance(spec: &GeneratorSpec) -> Result<Instance> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let b = spec.bbox;
    let point = |rng: &mut ChaCha8Rng| GeoPoint {
        lat: rng.random_range(b.min_lat..=b.max_lat),
        lon: rng.random_range(b.min_lon..=b.max_lon),
    };

    let vehicles: Vec<Vehicle> = (0..spec.n_vehicles)
        .map(|i| Vehicle {
            id: format!("v{}", i + 1),
            depot: point(&mut rng),
        })
        .collect();

    let (lo, hi) = spec.service_minutes_range;
    let mut locations = Vec::with_capacity(spec.n_jobs);
    let mut raw_service = Vec::with_capacity(spec.n_jobs);
    for _ in 0..spec.n_jobs {
        locations.push(point(&mut rng));
        raw_service.push(rng.random_range(lo..=hi));
    }
    let service = match spec.target_total_service {
        Some(target) => rescale_to_whole_minutes(&raw_service, target.round()),
        None => raw_service.iter().map(|s| s.round().max(1.0)).collect(),
    };

    let day_len = DEFAULT_DAY_END - DEFAULT_DAY_START;
    let jobs = locations
        .into_iter()
        .zip(service)
        .enumerate()
        .map(|(i, (location, service_minutes))| {
            let window = if rng.random::<f64>() < spec.window_fraction && service_minutes < day_len {
                let slack = rng.random_range(60.0..=180.0f64).round();
                let length = (service_minutes + slack).min(day_len);
                let start = rng
                    .random_range(DEFAULT_DAY_START..=DEFAULT_DAY_END - length)
                    .floor();
                Some(TimeWindow {
                    start,
                    end: start + length,
                })
            } else {
                None
            };
            Job {
                id: format!("j{}", i + 1),
                location,
                service_minutes,
                window,
            }
        })
        .collect();

    Instance::new(vehicles, jobs, DEFAULT_SPEED_KPH, DEFAULT_DAY_START, DEFAULT_DAY_END)
}

/// Proportional rescale to whole minutes summing exactly to `target`
/// (largest-remainder rounding, at least one minute each).
fn rescale_to_whole_minutes(raw: &[f64], target: f64) -> Vec<f64> {
    let n = raw.len();
    let spare = target - n as f64;
    let sum: f64 = raw.iter().sum();
    // one minute each is reserved so that no job rounds down to zero
    let exact: Vec<f64> = raw.iter().map(|r| r / sum * spare).collect();
    let mut out: Vec<f64> = exact.iter().map(|e| e.floor() + 1.0).collect();
    let mut short = (target - out.iter().sum::<f64>()).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &i in order.iter().cycle() {
        if short == 0 {
            break;
        }
        out[i] += 1.0;
        short -= 1;
    }
    out
}

/// Problem scales of the company scenarios: vehicle-days, jobs and total
/// job servicing time in minutes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub name: &'static str,
    pub vehicles: usize,
    pub jobs: usize,
    pub total_service_min: f64,
}

pub const SCENARIOS: [Scenario; 13] = [
    Scenario { name: "Week_1", vehicles: 8, jobs: 77, total_service_min: 2829.0 },
    Scenario { name: "Week_2", vehicles: 8, jobs: 79, total_service_min: 2904.0 },
    Scenario { name: "Week_3", vehicles: 8, jobs: 81, total_service_min: 2913.0 },
    Scenario { name: "Week_4", vehicles: 8, jobs: 61, total_service_min: 3292.0 },
    Scenario { name: "Fortnight_1", vehicles: 16, jobs: 156, total_service_min: 5733.0 },
    Scenario { name: "Fortnight_2", vehicles: 16, jobs: 138, total_service_min: 6121.0 },
    Scenario { name: "Fortnight_3", vehicles: 16, jobs: 160, total_service_min: 5817.0 },
    Scenario { name: "Fortnight_4", vehicles: 16, jobs: 142, total_service_min: 6205.0 },
    Scenario { name: "ThreeWeek_1", vehicles: 24, jobs: 237, total_service_min: 8646.0 },
    Scenario { name: "ThreeWeek_2", vehicles: 24, jobs: 217, total_service_min: 9025.0 },
    Scenario { name: "ThreeWeek_3", vehicles: 24, jobs: 219, total_service_min: 9034.0 },
    Scenario { name: "ThreeWeek_4", vehicles: 24, jobs: 221, total_service_min: 9109.0 },
    Scenario { name: "Month_1", vehicles: 32, jobs: 298, total_service_min: 11938.0 },
];

impl Scenario {
    pub fn by_name(name: &str) -> Option<Scenario> {
        SCENARIOS.iter().copied().find(|s| s.name.eq_ignore_ascii_case(name))
    }

    pub fn spec(&self, seed: u64) -> GeneratorSpec {
        GeneratorSpec {
            target_total_service: Some(self.total_service_min),
            ..GeneratorSpec::new(self.vehicles, self.jobs, seed)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn week_one_counts() {
        let inst = generate_instance(&GeneratorSpec::new(8, 77, 1)).unwrap();
        assert_eq!(inst.n_vehicles(), 8);
        assert_eq!(inst.n_jobs(), 77);
    }

    #[test]
    fn no_windows_when_fraction_is_zero() {
        let spec = GeneratorSpec {
            window_fraction: 0.0,
            ..GeneratorSpec::new(4, 200, 3)
        };
        let inst = generate_instance(&spec).unwrap();
        assert!(inst.jobs().iter().all(|j| j.window.is_none()));
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = Scenario::by_name("week_2").unwrap().spec(9);
        let a = generate_instance(&spec).unwrap().to_json().unwrap();
        let b = generate_instance(&spec).unwrap().to_json().unwrap();
        assert_eq!(a.as_bytes(), b.as_bytes());
        let c = generate_instance(&Scenario::by_name("week_2").unwrap().spec(10))
            .unwrap()
            .to_json()
            .unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn window_fraction_within_binomial_tolerance() {
        let spec = GeneratorSpec::new(8, 1000, 21);
        let inst = generate_instance(&spec).unwrap();
        let windowed = inst.jobs().iter().filter(|j| j.window.is_some()).count() as f64;
        let sigma = (1000.0f64 * 0.1 * 0.9).sqrt();
        assert!((windowed - 100.0).abs() <= 3.0 * sigma, "{windowed} windowed jobs");
    }

    #[test]
    fn target_total_is_hit_exactly() {
        for s in SCENARIOS {
            let inst = generate_instance(&s.spec(4)).unwrap();
            assert_eq!(inst.n_vehicles(), s.vehicles);
            assert_eq!(inst.n_jobs(), s.jobs);
            assert_eq!(inst.total_service(), s.total_service_min, "{}", s.name);
            assert!(inst.jobs().iter().all(|j| j.service_minutes >= 1.0
                && j.service_minutes.fract() == 0.0));
        }
    }

    #[test]
    fn invalid_specs() {
        let mut spec = GeneratorSpec::new(2, 5, 0);
        spec.bbox.max_lat = spec.bbox.min_lat;
        assert!(matches!(generate_instance(&spec), Err(Error::InvalidSpec(_))));

        let mut spec = GeneratorSpec::new(2, 5, 0);
        spec.service_minutes_range = (60.0, 10.0);
        assert!(matches!(generate_instance(&spec), Err(Error::InvalidSpec(_))));

        let mut spec = GeneratorSpec::new(2, 5, 0);
        spec.window_fraction = 1.5;
        assert!(generate_instance(&spec).is_err());

        assert!(generate_instance(&GeneratorSpec::new(0, 5, 0)).is_err());
    }

    #[test]
    fn month_scale_preset() {
        let s = Scenario::by_name("Month_1").unwrap();
        assert_eq!((s.vehicles, s.jobs), (32, 298));
    }
}
