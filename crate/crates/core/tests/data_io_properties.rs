use chrono::{Datelike, NaiveDate};
use proptest::prelude::*;
use thermalsum_core::data_io::{
    build_analysis_rows, haversine_km, match_station_at, read_analysis_csv, read_observations_csv,
    read_temperature_csv, write_analysis_csv, write_observations_csv, write_temperature_csv,
    PhenologyObservation, Station, StationRecord, TagFilter, TemperatureUnits, EARTH_RADIUS_KM,
};

fn law_of_cosines_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let c = p1.sin() * p2.sin() + p1.cos() * p2.cos() * (lon2 - lon1).to_radians().cos();
    EARTH_RADIUS_KM * c.clamp(-1.0, 1.0).acos()
}

fn station(id: &str, lat: f64, lon: f64) -> Station {
    Station {
        station_id: id.into(),
        latitude: lat,
        longitude: lon,
    }
}

/// Point `km` due north of (lat, lon).
fn north_of(lat: f64, km: f64) -> f64 {
    lat + (km / EARTH_RADIUS_KM).to_degrees()
}

#[test]
fn nearest_of_two_stations() {
    let (lat, lon) = (42.36, -71.06);
    let stations = [
        station("FAR", north_of(lat, 8.0), lon),
        station("NEAR", north_of(lat, -5.0), lon),
    ];
    let m = match_station_at(lat, lon, &stations).unwrap();
    assert_eq!(m.station_id, "NEAR");
    let oracle = law_of_cosines_km(lat, lon, stations[1].latitude, lon);
    assert!((m.distance_km - oracle).abs() < 1e-3);
    assert!((m.distance_km - 5.0).abs() < 1e-3);

    let lone = [station("X", north_of(lat, 20.0), lon)];
    assert!(match_station_at(lat, lon, &lone).is_none());
}

proptest! {
    #[test]
    fn haversine_symmetric_and_zero_on_diagonal(
        lat1 in -89.0f64..89.0, lon1 in -179.0f64..179.0,
        lat2 in -89.0f64..89.0, lon2 in -179.0f64..179.0,
    ) {
        let d = haversine_km(lat1, lon1, lat2, lon2);
        prop_assert_eq!(d, haversine_km(lat2, lon2, lat1, lon1));
        prop_assert_eq!(haversine_km(lat1, lon1, lat1, lon1), 0.0);
        prop_assert!((0.0..=EARTH_RADIUS_KM * std::f64::consts::PI + 1e-9).contains(&d));
    }

    #[test]
    fn haversine_agrees_with_law_of_cosines(
        lat in -60.0f64..60.0, lon in -170.0f64..170.0,
        dlat in -0.5f64..0.5, dlon in -0.5f64..0.5,
    ) {
        // the law of cosines loses precision for tiny separations; 1 m is ample above ~100 m
        let d = haversine_km(lat, lon, lat + dlat, lon + dlon);
        prop_assume!(d > 0.1);
        prop_assert!((d - law_of_cosines_km(lat, lon, lat + dlat, lon + dlon)).abs() < 1e-3);
    }

    #[test]
    fn temperature_csv_round_trip(
        rows in prop::collection::vec(
            ("[A-Z]{2}[0-9]{3}", 0u64..3000, -60.0f64..60.0, -170.0f64..170.0,
             prop::option::of(-30.0f64..40.0), prop::option::of(0.0f64..15.0)),
            0..40,
        ),
    ) {
        let start = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        let records: Vec<StationRecord> = rows
            .into_iter()
            .map(|(id, d, lat, lon, tmax, spread)| StationRecord {
                station_id: id,
                date: start + chrono::Days::new(d),
                latitude: lat,
                longitude: lon,
                tmax,
                tmin: tmax.zip(spread).map(|(t, s)| t - s),
            })
            .collect();
        let mut buf = Vec::new();
        write_temperature_csv(&mut buf, &records).unwrap();
        let parsed = read_temperature_csv(buf.as_slice(), TemperatureUnits::Celsius).unwrap();
        prop_assert!(parsed.rejected.is_empty());
        prop_assert_eq!(parsed.rows, records);
    }
}

#[test]
fn observation_and_analysis_csv_round_trip() {
    let obs = vec![PhenologyObservation {
        site_id: "S, 1".into(),
        latitude: 40.5,
        longitude: -75.25,
        year: 1990,
        bloom_doy: 131,
        species: "common lilac".into(),
        phenophase: "full bloom".into(),
    }];
    let mut buf = Vec::new();
    write_observations_csv(&mut buf, &obs).unwrap();
    assert_eq!(read_observations_csv(buf.as_slice()).unwrap().rows, obs);

    let rows = build_analysis_rows(&obs, &synthetic_station_year(), &TagFilter::default()).rows;
    assert_eq!(rows.len(), 1);
    let mut buf = Vec::new();
    write_analysis_csv(&mut buf, &rows).unwrap();
    let back = read_analysis_csv(buf.as_slice()).unwrap().rows;
    assert_eq!(back[0].site_id, rows[0].site_id);
    assert!((back[0].alpha_hat - rows[0].alpha_hat).abs() < 1e-5 * rows[0].alpha_hat.abs());
    assert!((back[0].beta_hat - rows[0].beta_hat).abs() < 1e-5 * rows[0].beta_hat.abs());
}

/// A full 1990 year at one station with midrange `1 + 0.2 * (doy - 1)`.
fn synthetic_station_year() -> Vec<StationRecord> {
    let start = NaiveDate::from_ymd_opt(1990, 1, 1).unwrap();
    (0..365)
        .map(|d| {
            let t = 1.0 + 0.2 * d as f64;
            StationRecord {
                station_id: "USC001".into(),
                date: start + chrono::Days::new(d),
                latitude: 40.52,
                longitude: -75.25,
                tmax: Some(t + 6.0),
                tmin: Some(t - 6.0),
            }
        })
        .collect()
}

#[test]
fn join_keeps_every_complete_observation() {
    let records = synthetic_station_year();
    let obs: Vec<PhenologyObservation> = (0..5)
        .map(|i| PhenologyObservation {
            site_id: format!("site{i}"),
            latitude: 40.5 + 0.01 * f64::from(i),
            longitude: -75.25,
            year: 1990,
            bloom_doy: 120 + i as u16,
            species: "common lilac".into(),
            phenophase: "full bloom".into(),
        })
        .collect();
    let rep = build_analysis_rows(&obs, &records, &TagFilter::default());
    assert_eq!(rep.rows.len(), 5);
    assert_eq!(rep.unmatched + rep.incomplete + rep.filtered_out, 0);
    for r in &rep.rows {
        // mean of 1 + 0.2 (d - 1) over d = 1..=59, slope 0.2 over Mar-Apr
        assert!((r.alpha_hat - 6.8).abs() < 1e-9);
        assert!((r.beta_hat - 0.2).abs() < 1e-9);
    }

    // drop half of February: Jan-Feb completeness 45/59 < 0.8
    let gappy: Vec<StationRecord> = records
        .into_iter()
        .filter(|r| !(r.date.month() == 2 && r.date.day() < 15))
        .collect();
    let rep = build_analysis_rows(&obs, &gappy, &TagFilter::default());
    assert_eq!(rep.rows.len(), 0);
    assert_eq!(rep.incomplete, 5);
}
