//! Great-circle geometry on a spherical Earth.
//!
//! The inline metric used everywhere in the crate is the spherical law of
//! cosines with a fixed radius of 6,378 km. The arccosine is evaluated through
//! `atan2(|a x b|, a . b)` on unit vectors: the denominator is exactly the
//! law-of-cosines argument, and the two-argument form stays accurate for
//! points a few meters apart where a bare `acos` loses most of its digits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_378_000.0;

/// A latitude/longitude pair in decimal degrees.
///
/// Latitude is within `[-90, 90]`, longitude is normalized to `[-180, 180)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    lat: f64,
    lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !lat.is_finite() || !lon.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(Error::InvalidCoordinate { lat, lon });
        }
        Ok(GeoPoint {
            lat,
            lon: normalize_lon(lon),
        })
    }

    pub fn lat(&self) -> f64 {
        self.lat
    }

    pub fn lon(&self) -> f64 {
        self.lon
    }

    pub(crate) fn unit(&self) -> UnitVector {
        UnitVector::from_point(*self)
    }
}

fn normalize_lon(lon: f64) -> f64 {
    if (-180.0..180.0).contains(&lon) {
        return lon;
    }
    let wrapped = (lon + 180.0).rem_euclid(360.0) - 180.0;
    // rem_euclid can round up to exactly 360 for tiny negative inputs
    if wrapped >= 180.0 {
        wrapped - 360.0
    } else {
        wrapped
    }
}

/// A non-negative, finite length in meters.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DistanceMeters(f64);

impl DistanceMeters {
    pub const ZERO: DistanceMeters = DistanceMeters(0.0);

    /// Returns `None` for negative or non-finite values.
    pub fn new(value: f64) -> Option<Self> {
        (value.is_finite() && value >= 0.0).then_some(DistanceMeters(value))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl std::fmt::Display for DistanceMeters {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.1} m", self.0)
    }
}

/// Point on the unit sphere, cached so that hot loops avoid recomputing
/// trigonometry per pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct UnitVector {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector {
    pub(crate) fn from_point(p: GeoPoint) -> Self {
        let (sin_lat, cos_lat) = p.lat.to_radians().sin_cos();
        let (sin_lon, cos_lon) = p.lon.to_radians().sin_cos();
        UnitVector {
            x: cos_lat * cos_lon,
            y: cos_lat * sin_lon,
            z: sin_lat,
        }
    }

    /// Central angle in radians.
    pub(crate) fn angle_to(&self, other: &UnitVector) -> f64 {
        let dot = self.x * other.x + self.y * other.y + self.z * other.z;
        let cx = self.y * other.z - self.z * other.y;
        let cy = self.z * other.x - self.x * other.z;
        let cz = self.x * other.y - self.y * other.x;
        let cross = (cx * cx + cy * cy + cz * cz).sqrt();
        // atan2 is the clamped arccos of `dot`: it never leaves [0, pi].
        cross.atan2(dot.clamp(-1.0, 1.0))
    }

    pub(crate) fn distance_m(&self, other: &UnitVector) -> f64 {
        (EARTH_RADIUS_M * self.angle_to(other)).max(0.0)
    }
}

/// Inline (great-circle) distance between two points.
pub fn great_circle(a: GeoPoint, b: GeoPoint) -> DistanceMeters {
    if a == b {
        return DistanceMeters::ZERO;
    }
    DistanceMeters(a.unit().distance_m(&b.unit()))
}
