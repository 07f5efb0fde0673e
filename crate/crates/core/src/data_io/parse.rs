use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;

use super::{AnalysisRow, DataError, PhenologyObservation, StationRecord};
use crate::stats::format_sig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TemperatureUnits {
    #[default]
    Celsius,
    /// Raw GHCND integers in tenths of a degree.
    Tenths,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowRejection {
    pub line: u64,
    pub reason: String,
}

/// Parsed rows plus the rows that were skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Parsed<T> {
    pub rows: Vec<T>,
    pub rejected: Vec<RowRejection>,
}

impl<T> Parsed<T> {
    pub fn rejected_count(&self) -> usize {
        self.rejected.len()
    }
}

const TEMPERATURE_COLUMNS: [&str; 6] = ["station_id", "date", "lat", "lon", "tmax", "tmin"];
const OBSERVATION_COLUMNS: [&str; 7] = [
    "site_id",
    "lat",
    "lon",
    "year",
    "bloom_doy",
    "species",
    "phenophase",
];
const ANALYSIS_COLUMNS: [&str; 5] = ["site", "year", "alpha", "beta", "bloom_doy"];

/// Column positions for `wanted`, resolved against the header by name.
struct Columns(Vec<usize>);

impl Columns {
    fn resolve(header: &csv::StringRecord, wanted: &[&str]) -> Result<Self, DataError> {
        let mut idx = Vec::with_capacity(wanted.len());
        let mut missing = Vec::new();
        for name in wanted {
            match header.iter().position(|h| h.trim() == *name) {
                Some(i) => idx.push(i),
                None => missing.push(*name),
            }
        }
        if missing.is_empty() {
            Ok(Self(idx))
        } else {
            Err(DataError::MissingHeader(missing.join(",")))
        }
    }

    fn get<'r>(&self, rec: &'r csv::StringRecord, col: usize) -> &'r str {
        rec.get(self.0[col]).map(str::trim).unwrap_or("")
    }
}

fn lf_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

fn field<T: FromStr>(raw: &str, name: &str) -> Result<T, String> {
    raw.parse()
        .map_err(|_| format!("cannot parse {name} from {raw:?}"))
}

fn optional_f64(raw: &str, name: &str) -> Result<Option<f64>, String> {
    if raw.is_empty() || raw.eq_ignore_ascii_case("na") {
        Ok(None)
    } else {
        field(raw, name).map(Some)
    }
}

/// Reads all bytes, rejects empty input, and hands back a header-aware reader.
fn open_csv<R: Read>(mut reader: R) -> Result<csv::Reader<io::Cursor<Vec<u8>>>, DataError> {
    let mut buf = Vec::new();
    reader.read_to_end(&mut buf)?;
    if buf.iter().all(u8::is_ascii_whitespace) {
        return Err(DataError::EmptyFile);
    }
    Ok(csv::ReaderBuilder::new()
        .flexible(true)
        .from_reader(io::Cursor::new(buf)))
}

fn parse_rows<R: Read, T>(
    reader: R,
    columns: &[&str],
    mut parse: impl FnMut(&Columns, &csv::StringRecord) -> Result<T, String>,
) -> Result<Parsed<T>, DataError> {
    let mut rdr = open_csv(reader)?;
    let cols = Columns::resolve(rdr.headers()?, columns)?;
    let mut out = Parsed {
        rows: Vec::new(),
        rejected: Vec::new(),
    };
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        match parse(&cols, &rec) {
            Ok(row) => out.rows.push(row),
            Err(reason) => out.rejected.push(RowRejection { line, reason }),
        }
    }
    Ok(out)
}

/// Header `station_id,date,lat,lon,tmax,tmin` in any column order; dates are
/// ISO-8601 and empty temperatures are missing. Unparseable or invalid rows
/// are reported, not fatal.
pub fn read_temperature_csv<R: Read>(
    reader: R,
    units: TemperatureUnits,
) -> Result<Parsed<StationRecord>, DataError> {
    let scale = match units {
        TemperatureUnits::Celsius => 1.0,
        TemperatureUnits::Tenths => 0.1,
    };
    parse_rows(reader, &TEMPERATURE_COLUMNS, |c, rec| {
        let date = NaiveDate::parse_from_str(c.get(rec, 1), "%Y-%m-%d")
            .map_err(|e| format!("bad date {:?}: {e}", c.get(rec, 1)))?;
        let r = StationRecord {
            station_id: c.get(rec, 0).to_string(),
            date,
            latitude: field(c.get(rec, 2), "lat")?,
            longitude: field(c.get(rec, 3), "lon")?,
            tmax: optional_f64(c.get(rec, 4), "tmax")?.map(|t| t * scale),
            tmin: optional_f64(c.get(rec, 5), "tmin")?.map(|t| t * scale),
        };
        if r.station_id.is_empty() {
            return Err("empty station_id".into());
        }
        r.check()?;
        Ok(r)
    })
}

pub fn parse_temperature_csv(
    path: impl AsRef<Path>,
    units: TemperatureUnits,
) -> Result<Parsed<StationRecord>, DataError> {
    read_temperature_csv(BufReader::new(File::open(path)?), units)
}

/// Writes records in °C with shortest round-trip float formatting.
pub fn write_temperature_csv<W: Write>(w: W, records: &[StationRecord]) -> Result<(), DataError> {
    let mut wtr = lf_writer(w);
    wtr.write_record(TEMPERATURE_COLUMNS)?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in records {
        wtr.write_record([
            r.station_id.clone(),
            r.date.format("%Y-%m-%d").to_string(),
            r.latitude.to_string(),
            r.longitude.to_string(),
            opt(r.tmax),
            opt(r.tmin),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Header `site_id,lat,lon,year,bloom_doy,species,phenophase`.
pub fn read_observations_csv<R: Read>(
    reader: R,
) -> Result<Parsed<PhenologyObservation>, DataError> {
    parse_rows(reader, &OBSERVATION_COLUMNS, |c, rec| {
        let o = PhenologyObservation {
            site_id: c.get(rec, 0).to_string(),
            latitude: field(c.get(rec, 1), "lat")?,
            longitude: field(c.get(rec, 2), "lon")?,
            year: field(c.get(rec, 3), "year")?,
            bloom_doy: field(c.get(rec, 4), "bloom_doy")?,
            species: c.get(rec, 5).to_string(),
            phenophase: c.get(rec, 6).to_string(),
        };
        o.check()?;
        Ok(o)
    })
}

pub fn write_observations_csv<W: Write>(
    w: W,
    observations: &[PhenologyObservation],
) -> Result<(), DataError> {
    let mut wtr = lf_writer(w);
    wtr.write_record(OBSERVATION_COLUMNS)?;
    for o in observations {
        wtr.write_record([
            o.site_id.clone(),
            o.latitude.to_string(),
            o.longitude.to_string(),
            o.year.to_string(),
            o.bloom_doy.to_string(),
            o.species.clone(),
            o.phenophase.clone(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// `site,year,alpha,beta,bloom_doy` with floats at 6 significant digits.
pub fn write_analysis_csv<W: Write>(w: W, rows: &[AnalysisRow]) -> Result<(), DataError> {
    let mut wtr = lf_writer(w);
    wtr.write_record(ANALYSIS_COLUMNS)?;
    for r in rows {
        wtr.write_record([
            r.site_id.clone(),
            r.year.to_string(),
            format_sig(r.alpha_hat, 6),
            format_sig(r.beta_hat, 6),
            r.bloom_doy.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_analysis_csv<R: Read>(reader: R) -> Result<Parsed<AnalysisRow>, DataError> {
    parse_rows(reader, &ANALYSIS_COLUMNS, |c, rec| {
        let row = AnalysisRow {
            site_id: c.get(rec, 0).to_string(),
            year: field(c.get(rec, 1), "year")?,
            alpha_hat: field(c.get(rec, 2), "alpha")?,
            beta_hat: field(c.get(rec, 3), "beta")?,
            bloom_doy: field(c.get(rec, 4), "bloom_doy")?,
        };
        if !(1..=366).contains(&row.bloom_doy) {
            return Err(format!("bloom_doy {} outside 1..=366", row.bloom_doy));
        }
        if !(row.alpha_hat.is_finite() && row.beta_hat.is_finite()) {
            return Err("non-finite alpha or beta".into());
        }
        Ok(row)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "station_id,date,lat,lon,tmax,tmin
USW1,2001-01-01,40.0,-75.0,10,0
USW1,2001-01-02,40.0,-75.0,5.5,-2.5
USW1,2001-01-03,40.0,-75.0,,1
";

    #[test]
    fn happy_path() {
        let p = read_temperature_csv(GOOD.as_bytes(), TemperatureUnits::Celsius).unwrap();
        assert_eq!(p.rows.len(), 3);
        assert_eq!(p.rejected_count(), 0);
        assert_eq!(p.rows[0].midrange(), Some(5.0));
        assert_eq!(p.rows[2].tmax, None);
        assert_eq!(p.rows[2].midrange(), None);
    }

    #[test]
    fn inverted_temperatures_rejected() {
        let text = format!("{GOOD}USW1,2001-01-04,40.0,-75.0,1,3\nUSW1,notadate,40,-75,1,0\n");
        let p = read_temperature_csv(text.as_bytes(), TemperatureUnits::Celsius).unwrap();
        assert_eq!(p.rows.len(), 3);
        assert_eq!(p.rejected_count(), 2);
        assert_eq!(p.rejected[0].line, 5);
        assert!(p.rejected[0].reason.contains("exceeds"));
    }

    #[test]
    fn tenths_units() {
        let text = "station_id,date,lat,lon,tmax,tmin\nX,2001-03-01,1,2,123,-45\n";
        let p = read_temperature_csv(text.as_bytes(), TemperatureUnits::Tenths).unwrap();
        assert!((p.rows[0].tmax.unwrap() - 12.3).abs() < 1e-12);
        assert!((p.rows[0].tmin.unwrap() + 4.5).abs() < 1e-12);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            read_temperature_csv("".as_bytes(), TemperatureUnits::Celsius),
            Err(DataError::EmptyFile)
        ));
        assert!(matches!(
            read_temperature_csv(
                "station_id,date,lat,lon,tmax\nX,2001-01-01,1,1,1\n".as_bytes(),
                TemperatureUnits::Celsius
            ),
            Err(DataError::MissingHeader(ref m)) if m == "tmin"
        ));
    }

    #[test]
    fn columns_in_any_order() {
        let text = "tmin,tmax,date,station_id,lon,lat\n0,10,2001-01-01,X,-75,40\n";
        let p = read_temperature_csv(text.as_bytes(), TemperatureUnits::Celsius).unwrap();
        assert_eq!(p.rows[0].latitude, 40.0);
        assert_eq!(p.rows[0].tmax, Some(10.0));
    }

    #[test]
    fn observations_validate_doy() {
        let text = "site_id,lat,lon,year,bloom_doy,species,phenophase
S1,40,-75,2001,120,common lilac,full bloom
S2,40,-75,2001,0,common lilac,full bloom
";
        let p = read_observations_csv(text.as_bytes()).unwrap();
        assert_eq!(p.rows.len(), 1);
        assert_eq!(p.rejected_count(), 1);
    }

    #[test]
    fn analysis_csv_sig_digits() {
        let rows = [AnalysisRow {
            site_id: "S".into(),
            year: 2001,
            alpha_hat: 1.0 / 3.0,
            beta_hat: 0.123456789,
            bloom_doy: 130,
        }];
        let mut buf = Vec::new();
        write_analysis_csv(&mut buf, &rows).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "site,year,alpha,beta,bloom_doy\nS,2001,0.333333,0.123457,130\n"
        );
    }
}
