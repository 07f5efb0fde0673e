use std::collections::{BTreeMap, HashMap};

use chrono::Datelike;

use super::geo::match_station;
use super::{AnalysisRow, PhenologyObservation, Station, StationRecord};
use crate::regime::{estimate_regime, DailyTemperatureSeries, RegimeEstimate};

/// Daily midrange temperatures of one station-year. Days with either
/// extreme missing stay missing; for duplicate dates the first record wins.
pub fn midrange_series(
    records: &[StationRecord],
    station_id: &str,
    year: i32,
) -> DailyTemperatureSeries {
    let mut series = DailyTemperatureSeries::empty(station_id, year)
        .expect("year of a parsed chrono date is valid");
    let mut seen = vec![false; series.days_in_year() as usize + 1];
    for r in records
        .iter()
        .filter(|r| r.station_id == station_id && r.date.year() == year)
    {
        let day = r.date.ordinal();
        if !seen[day as usize] {
            seen[day as usize] = true;
            series
                .set(day, r.midrange())
                .expect("ordinal is within the year");
        }
    }
    series
}

/// One entry per station id (first-seen coordinates), sorted by id.
pub fn stations_from_records(records: &[StationRecord]) -> Vec<Station> {
    let mut by_id: BTreeMap<&str, Station> = BTreeMap::new();
    for r in records {
        by_id.entry(&r.station_id).or_insert_with(|| Station {
            station_id: r.station_id.clone(),
            latitude: r.latitude,
            longitude: r.longitude,
        });
    }
    by_id.into_values().collect()
}

/// Exact string match on species and phenophase; `None` accepts anything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagFilter {
    pub species: Option<String>,
    pub phenophase: Option<String>,
}

impl TagFilter {
    pub fn accepts(&self, o: &PhenologyObservation) -> bool {
        self.species.as_deref().is_none_or(|s| s == o.species)
            && self.phenophase.as_deref().is_none_or(|p| p == o.phenophase)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JoinReport {
    pub rows: Vec<AnalysisRow>,
    pub filtered_out: usize,
    /// No station within the matching radius.
    pub unmatched: usize,
    /// Matched, but the station-year failed a completeness gate.
    pub incomplete: usize,
}

/// Matches each observation to its nearest station and attaches that
/// station-year's regime estimates.
pub fn build_analysis_rows(
    observations: &[PhenologyObservation],
    records: &[StationRecord],
    filter: &TagFilter,
) -> JoinReport {
    let stations = stations_from_records(records);
    let mut by_station: HashMap<&str, Vec<StationRecord>> = HashMap::new();
    for r in records {
        by_station
            .entry(r.station_id.as_str())
            .or_default()
            .push(r.clone());
    }
    let mut cache: HashMap<(String, i32), Option<RegimeEstimate>> = HashMap::new();
    let mut report = JoinReport::default();
    for o in observations {
        if !filter.accepts(o) {
            report.filtered_out += 1;
            continue;
        }
        let Some(m) = match_station(o, &stations) else {
            report.unmatched += 1;
            continue;
        };
        let est = cache
            .entry((m.station_id.clone(), o.year))
            .or_insert_with(|| {
                let recs = by_station
                    .get(m.station_id.as_str())
                    .map(Vec::as_slice)
                    .unwrap_or(&[]);
                estimate_regime(&midrange_series(recs, &m.station_id, o.year)).ok()
            });
        match est {
            Some(e) => report.rows.push(AnalysisRow {
                site_id: o.site_id.clone(),
                year: o.year,
                alpha_hat: e.alpha_hat,
                beta_hat: e.beta_hat,
                bloom_doy: o.bloom_doy,
            }),
            None => report.incomplete += 1,
        }
    }
    report
}
