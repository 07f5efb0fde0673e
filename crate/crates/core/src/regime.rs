//! Winter level and spring warming rate estimated from a site-year's daily
//! effective temperatures.
//!
//! `alpha` is the mean over Jan 1 to the last day of February and `beta` is
//! the OLS slope of temperature on day-of-year over March and April. Both
//! windows must be at least [`COMPLETENESS_THRESHOLD`] complete; missing
//! days are dropped, never imputed.

use std::io::{self, Write};
use std::ops::RangeInclusive;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::format_sig;

pub const COMPLETENESS_THRESHOLD: f64 = 0.8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("insufficient data in {window}: {present} of {total} days present (need {threshold:.0}%)", threshold = COMPLETENESS_THRESHOLD * 100.0)]
    InsufficientData {
        window: Window,
        present: usize,
        total: usize,
    },
    #[error("regression needs at least 3 distinct days (got {0})")]
    DegenerateDesign(usize),
    #[error("day {day} outside 1..={days_in_year} for year {year}")]
    DayOutOfRange {
        day: u32,
        year: i32,
        days_in_year: u32,
    },
    #[error("invalid year {0}")]
    InvalidYear(i32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    JanFeb,
    MarApr,
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Window::JanFeb => f.write_str("Jan-Feb"),
            Window::MarApr => f.write_str("Mar-Apr"),
        }
    }
}

pub fn is_leap_year(year: i32) -> bool {
    NaiveDate::from_ymd_opt(year, 2, 29).is_some()
}

pub fn days_in_year(year: i32) -> u32 {
    if is_leap_year(year) {
        366
    } else {
        365
    }
}

impl Window {
    /// Day-of-year range (day 1 = Jan 1) for `year`.
    pub fn days(&self, year: i32) -> RangeInclusive<u32> {
        let leap = u32::from(is_leap_year(year));
        match self {
            Window::JanFeb => 1..=59 + leap,
            Window::MarApr => 60 + leap..=120 + leap,
        }
    }
}

/// Daily effective temperatures of one site-year, indexed by day-of-year.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DailyTemperatureSeries {
    pub site_id: String,
    pub year: i32,
    values: Vec<Option<f64>>,
}

impl DailyTemperatureSeries {
    /// An all-missing series.
    pub fn empty(site_id: impl Into<String>, year: i32) -> Result<Self, EstimationError> {
        if NaiveDate::from_ymd_opt(year, 1, 1).is_none() {
            return Err(EstimationError::InvalidYear(year));
        }
        Ok(Self {
            site_id: site_id.into(),
            year,
            values: vec![None; days_in_year(year) as usize],
        })
    }

    /// `values[0]` is Jan 1. Shorter inputs are padded with missing days.
    pub fn from_values(
        site_id: impl Into<String>,
        year: i32,
        values: Vec<Option<f64>>,
    ) -> Result<Self, EstimationError> {
        let mut s = Self::empty(site_id, year)?;
        let n = s.values.len();
        if values.len() > n {
            return Err(EstimationError::DayOutOfRange {
                day: values.len() as u32,
                year,
                days_in_year: n as u32,
            });
        }
        s.values[..values.len()].copy_from_slice(&values);
        Ok(s)
    }

    pub fn days_in_year(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn get(&self, day: u32) -> Option<f64> {
        let idx = (day as usize).checked_sub(1)?;
        self.values.get(idx).copied().flatten()
    }

    pub fn set(&mut self, day: u32, value: Option<f64>) -> Result<(), EstimationError> {
        let n = self.days_in_year();
        if day == 0 || day > n {
            return Err(EstimationError::DayOutOfRange {
                day,
                year: self.year,
                days_in_year: n,
            });
        }
        self.values[day as usize - 1] = value;
        Ok(())
    }

    /// `(day, value)` for every present day in ascending order.
    pub fn present(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i as u32 + 1, v)))
    }

    pub fn window_values(&self, window: Window) -> Vec<(u32, f64)> {
        window
            .days(self.year)
            .filter_map(|d| self.get(d).map(|v| (d, v)))
            .collect()
    }

    /// Fraction of Jan 1 to Apr 30 with a value.
    pub fn completeness(&self) -> f64 {
        let first = *Window::JanFeb.days(self.year).start();
        let last = *Window::MarApr.days(self.year).end();
        let total = (last - first + 1) as f64;
        let present = (first..=last).filter(|&d| self.get(d).is_some()).count();
        present as f64 / total
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            site_id: self.site_id.clone(),
            year: self.year,
            values: self.values.iter().map(|v| v.map(&f)).collect(),
        }
    }
}

/// Sets negative temperatures to the 0 °C base; missing stays missing.
pub fn clip_base(series: &DailyTemperatureSeries) -> DailyTemperatureSeries {
    series.map_values(|v| v.max(0.0))
}

fn check_window(
    series: &DailyTemperatureSeries,
    window: Window,
) -> Result<Vec<(u32, f64)>, EstimationError> {
    let total = window.days(series.year).count();
    let obs = series.window_values(window);
    if (obs.len() as f64) < COMPLETENESS_THRESHOLD * total as f64 {
        return Err(EstimationError::InsufficientData {
            window,
            present: obs.len(),
            total,
        });
    }
    Ok(obs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaEstimate {
    pub alpha_hat: f64,
    pub n_days: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta_hat: f64,
    /// `None` when the temperatures are constant over the window.
    pub r_squared: Option<f64>,
    pub n_days: usize,
}

pub fn estimate_alpha(series: &DailyTemperatureSeries) -> Result<AlphaEstimate, EstimationError> {
    let obs = check_window(series, Window::JanFeb)?;
    let alpha_hat = obs.iter().map(|&(_, v)| v).sum::<f64>() / obs.len() as f64;
    Ok(AlphaEstimate {
        alpha_hat,
        n_days: obs.len(),
    })
}

pub fn estimate_beta(series: &DailyTemperatureSeries) -> Result<BetaEstimate, EstimationError> {
    let obs = check_window(series, Window::MarApr)?;
    let xs: Vec<f64> = obs.iter().map(|&(d, _)| f64::from(d)).collect();
    let ys: Vec<f64> = obs.iter().map(|&(_, v)| v).collect();
    let fit = ols(&xs, &ys)?;
    Ok(BetaEstimate {
        beta_hat: fit.slope,
        r_squared: fit.r_squared,
        n_days: obs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: Option<f64>,
}

/// Simple linear regression of `ys` on `xs` with an intercept.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<OlsFit, EstimationError> {
    assert_eq!(xs.len(), ys.len(), "ols: length mismatch");
    let mut distinct = xs.to_vec();
    distinct.sort_unstable_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(EstimationError::DegenerateDesign(distinct.len()));
    }
    let n = xs.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / n;
    let y_bar = ys.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - x_bar, y - y_bar);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let r_squared = (syy > 0.0).then(|| (sxy * sxy / (sxx * syy)).min(1.0));
    Ok(OlsFit {
        slope,
        intercept: y_bar - slope * x_bar,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeEstimate {
    pub site_id: String,
    pub year: i32,
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub n_alpha_days: usize,
    pub n_beta_days: usize,
    pub r_squared_beta: Option<f64>,
}

/// Clips at the base temperature once, then estimates both parameters.
pub fn estimate_regime(series: &DailyTemperatureSeries) -> Result<RegimeEstimate, EstimationError> {
    let clipped = clip_base(series);
    let a = estimate_alpha(&clipped)?;
    let b = estimate_beta(&clipped)?;
    Ok(RegimeEstimate {
        site_id: series.site_id.clone(),
        year: series.year,
        alpha_hat: a.alpha_hat,
        beta_hat: b.beta_hat,
        n_alpha_days: a.n_days,
        n_beta_days: b.n_days,
        r_squared_beta: b.r_squared,
    })
}

/// `site,year,alpha,beta,n_alpha,n_beta,r2`
pub fn write_estimates_csv<W: Write>(mut w: W, rows: &[RegimeEstimate]) -> io::Result<()> {
    writeln!(w, "site,year,alpha,beta,n_alpha,n_beta,r2")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.site_id,
            r.year,
            format_sig(r.alpha_hat, 6),
            format_sig(r.beta_hat, 6),
            r.n_alpha_days,
            r.n_beta_days,
            r.r_squared_beta
                .map(|v| format_sig(v, 6))
                .unwrap_or_default()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full(year: i32, f: impl Fn(u32) -> f64) -> DailyTemperatureSeries {
        let n = days_in_year(year);
        DailyTemperatureSeries::from_values("s", year, (1..=n).map(|d| Some(f(d))).collect())
            .unwrap()
    }

    #[test]
    fn clipping_examples() {
        let s = DailyTemperatureSeries::from_values(
            "s",
            2001,
            vec![Some(-3.0), Some(2.0), Some(0.0), None],
        )
        .unwrap();
        let c = clip_base(&s);
        assert_eq!(
            (1..=4).map(|d| c.get(d)).collect::<Vec<_>>(),
            vec![Some(0.0), Some(2.0), Some(0.0), None]
        );
        let pos = full(2001, |d| 1.0 + f64::from(d));
        assert_eq!(clip_base(&pos), pos);
        let neg = full(2001, |_| -5.0);
        assert!(clip_base(&neg).present().all(|(_, v)| v == 0.0));
    }

    #[test]
    fn windows_respect_leap_years() {
        assert_eq!(Window::JanFeb.days(2001), 1..=59);
        assert_eq!(Window::MarApr.days(2001), 60..=120);
        assert_eq!(Window::JanFeb.days(2004), 1..=60);
        assert_eq!(Window::MarApr.days(2004), 61..=121);
        assert_eq!(Window::JanFeb.days(1900), 1..=59);
        assert_eq!(Window::JanFeb.days(2000), 1..=60);
    }

    #[test]
    fn alpha_examples() {
        let s = full(2001, |_| 5.0);
        assert_eq!(estimate_alpha(&s).unwrap().alpha_hat, 5.0);

        let s = full(2001, |d| if d <= 31 { 0.0 } else { 4.0 });
        let a = estimate_alpha(&s).unwrap();
        assert_eq!(a.n_days, 59);
        assert!((a.alpha_hat - 112.0 / 59.0).abs() < 1e-12);
    }

    #[test]
    fn beta_examples() {
        let s = full(2001, |d| 0.1 * (f64::from(d) - 59.0));
        let b = estimate_beta(&s).unwrap();
        assert!((b.beta_hat - 0.1).abs() < 1e-12);
        assert!((b.r_squared.unwrap() - 1.0).abs() < 1e-12);

        let s = full(2001, |_| 7.0);
        let b = estimate_beta(&s).unwrap();
        assert_eq!(b.beta_hat, 0.0);
        assert_eq!(b.r_squared, None);
    }

    #[test]
    fn completeness_gate() {
        let mut s = full(2001, |_| 5.0);
        // 59-day window; 47 present is 79.7%
        for d in 1..=12 {
            s.set(d, None).unwrap();
        }
        assert!(matches!(
            estimate_alpha(&s),
            Err(EstimationError::InsufficientData {
                window: Window::JanFeb,
                present: 47,
                total: 59
            })
        ));
        s.set(12, Some(5.0)).unwrap();
        assert_eq!(estimate_alpha(&s).unwrap().n_days, 48);
    }

    #[test]
    fn degenerate_design() {
        assert_eq!(
            ols(&[1.0, 1.0, 2.0], &[0.0, 1.0, 2.0]),
            Err(EstimationError::DegenerateDesign(2))
        );
    }

    #[test]
    fn out_of_range_day() {
        let mut s = DailyTemperatureSeries::empty("s", 2001).unwrap();
        assert!(s.set(366, Some(1.0)).is_err());
        assert!(s.set(0, Some(1.0)).is_err());
        let mut s = DailyTemperatureSeries::empty("s", 2004).unwrap();
        assert!(s.set(366, Some(1.0)).is_ok());
    }

    #[test]
    fn estimates_csv() {
        let e = estimate_regime(&full(2001, |d| 2.0 + 0.1 * f64::from(d))).unwrap();
        let mut buf = Vec::new();
        write_estimates_csv(&mut buf, &[e]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert_eq!(line, "s,2001,5,0.1,59,61,1");
    }
}
