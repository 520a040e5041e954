use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean Earth radius used for all great-circle distances.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Default average urban van speed.
pub const DEFAULT_SPEED_KPH: f64 = 13.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        let p = GeoPoint { lat, lon };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<()> {
        if !self.lat.is_finite() || !self.lon.is_finite() {
            return Err(Error::InvalidInput(format!(
                "non-finite coordinate ({}, {})",
                self.lat, self.lon
            )));
        }
        if !(-90.0..=90.0).contains(&self.lat) || !(-180.0..=180.0).contains(&self.lon) {
            return Err(Error::InvalidInput(format!(
                "coordinate out of range ({}, {})",
                self.lat, self.lon
            )));
        }
        Ok(())
    }
}

/// Great-circle distance in kilometres.
pub fn haversine_km(a: GeoPoint, b: GeoPoint) -> f64 {
    let lat1 = a.lat.to_radians();
    let lat2 = b.lat.to_radians();
    let dlat = (b.lat - a.lat).to_radians();
    let dlon = (b.lon - a.lon).to_radians();

    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    // rounding can push h a hair above 1 for antipodal points
    2.0 * EARTH_RADIUS_KM * h.min(1.0).sqrt().asin()
}

/// Driving time in minutes between two points at a constant speed.
pub fn travel_time(a: GeoPoint, b: GeoPoint, speed_kph: f64) -> Result<f64> {
    a.check()?;
    b.check()?;
    if !(speed_kph.is_finite() && speed_kph > 0.0) {
        return Err(Error::InvalidInput(format!("speed must be positive, got {speed_kph}")));
    }
    Ok(haversine_km(a, b) / speed_kph * 60.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng) -> GeoPoint {
        GeoPoint::new(rng.random_range(52.3..52.7), rng.random_range(-2.1..-1.6)).unwrap()
    }

    #[test]
    fn identical_points_are_zero_minutes() {
        let p = GeoPoint::new(52.48, -1.89).unwrap();
        assert_eq!(travel_time(p, p, 13.0).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = random_point(&mut rng);
            let b = random_point(&mut rng);
            assert_eq!(travel_time(a, b, 13.0).unwrap(), travel_time(b, a, 13.0).unwrap());
        }
    }

    #[test]
    fn one_kilometre_at_13_kph() {
        // latitude offset of 1/6371 rad along a meridian, from an
        // arbitrary-precision haversine: 0.008993216059187305 degrees
        let a = GeoPoint::new(52.48, -1.89).unwrap();
        let b = GeoPoint::new(52.48 + 0.008_993_216_059_187_305, -1.89).unwrap();
        let t = travel_time(a, b, 13.0).unwrap();
        assert!((t - 60.0 / 13.0).abs() < 1e-9, "got {t}");
        assert!((t - 4.6154).abs() < 5e-5);
    }

    #[test]
    fn rejects_non_finite() {
        let good = GeoPoint { lat: 1.0, lon: 1.0 };
        let bad = GeoPoint { lat: f64::NAN, lon: 0.0 };
        assert!(matches!(travel_time(good, bad, 13.0), Err(Error::InvalidInput(_))));
        assert!(GeoPoint::new(f64::INFINITY, 0.0).is_err());
        assert!(GeoPoint::new(91.0, 0.0).is_err());
        assert!(travel_time(good, good, 0.0).is_err());
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = random_point(&mut rng);
            let b = random_point(&mut rng);
            let c = random_point(&mut rng);
            let ab = travel_time(a, b, 13.0).unwrap();
            let bc = travel_time(b, c, 13.0).unwrap();
            let ac = travel_time(a, c, 13.0).unwrap();
            assert!(ab >= 0.0);
            assert!(ac <= ab + bc + 1e-9, "triangle inequality: {ac} > {ab} + {bc}");
            if a != b {
                assert!(ab > 0.0);
            }
        }
    }
}
