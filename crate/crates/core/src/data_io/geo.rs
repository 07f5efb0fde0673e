//! Great-circle distances and nearest-station matching.

use super::{PhenologyObservation, Station};

/// Mean Earth radius, km.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;
/// Ten statute miles.
pub const MATCH_RADIUS_KM: f64 = 16.0934;

/// Haversine distance in km between two (lat, lon) points in degrees.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin()
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationMatch {
    pub station_id: String,
    pub distance_km: f64,
}

/// Nearest station within [`MATCH_RADIUS_KM`]; equal distances go to the
/// lexicographically smallest id.
pub fn match_station(site: &PhenologyObservation, stations: &[Station]) -> Option<StationMatch> {
    match_station_at(site.latitude, site.longitude, stations)
}

pub fn match_station_at(lat: f64, lon: f64, stations: &[Station]) -> Option<StationMatch> {
    stations
        .iter()
        .map(|s| (haversine_km(lat, lon, s.latitude, s.longitude), s))
        .filter(|(d, _)| *d <= MATCH_RADIUS_KM)
        .min_by(|(da, a), (db, b)| {
            da.total_cmp(db)
                .then_with(|| a.station_id.cmp(&b.station_id))
        })
        .map(|(d, s)| StationMatch {
            station_id: s.station_id.clone(),
            distance_km: d,
        })
}
