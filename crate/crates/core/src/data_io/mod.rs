//! Ingest of station temperature records and phenology observations, station
//! matching, and the joined per-site-year analysis table.

mod geo;
mod join;
mod parse;

pub use geo::{
    haversine_km, match_station, match_station_at, StationMatch, EARTH_RADIUS_KM, MATCH_RADIUS_KM,
};
pub use join::{
    build_analysis_rows, midrange_series, stations_from_records, JoinReport, TagFilter,
};
pub use parse::{
    parse_temperature_csv, read_analysis_csv, read_observations_csv, read_temperature_csv,
    write_analysis_csv, write_observations_csv, write_temperature_csv, Parsed, RowRejection,
    TemperatureUnits,
};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("input is empty")]
    EmptyFile,
    #[error("header is missing required column(s): {0}")]
    MissingHeader(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One day of station observations. Temperatures in °C.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationRecord {
    pub station_id: String,
    pub date: NaiveDate,
    pub latitude: f64,
    pub longitude: f64,
    pub tmax: Option<f64>,
    pub tmin: Option<f64>,
}

impl StationRecord {
    pub fn check(&self) -> Result<(), String> {
        if !(self.latitude.abs() <= 90.0) {
            return Err(format!("latitude {} out of range", self.latitude));
        }
        if !(self.longitude.abs() <= 180.0) {
            return Err(format!("longitude {} out of range", self.longitude));
        }
        for t in [self.tmax, self.tmin].into_iter().flatten() {
            if !t.is_finite() {
                return Err("non-finite temperature".into());
            }
        }
        if let (Some(hi), Some(lo)) = (self.tmax, self.tmin) {
            if hi < lo {
                return Err(format!("tmin {lo} exceeds tmax {hi}"));
            }
        }
        Ok(())
    }

    /// `(tmax + tmin) / 2`, missing if either is missing.
    pub fn midrange(&self) -> Option<f64> {
        Some((self.tmax? + self.tmin?) / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Station {
    pub station_id: String,
    pub latitude: f64,
    pub longitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhenologyObservation {
    pub site_id: String,
    pub latitude: f64,
    pub longitude: f64,
    pub year: i32,
    /// Day of year, 1 = Jan 1.
    pub bloom_doy: u16,
    pub species: String,
    pub phenophase: String,
}

impl PhenologyObservation {
    pub fn check(&self) -> Result<(), String> {
        if !(1..=366).contains(&self.bloom_doy) {
            return Err(format!("bloom_doy {} outside 1..=366", self.bloom_doy));
        }
        if !(self.latitude.abs() <= 90.0 && self.longitude.abs() <= 180.0) {
            return Err("coordinates out of range".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRow {
    pub site_id: String,
    pub year: i32,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub bloom_doy: u16,
}
