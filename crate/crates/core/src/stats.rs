//! Small descriptive-statistics helpers shared across modules.

use statrs::distribution::{ContinuousCDF, Normal};

pub fn mean(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    Some(xs.iter().sum::<f64>() / xs.len() as f64)
}

/// Sample standard deviation with the `n - 1` denominator; `None` for fewer
/// than two values.
pub fn sample_sd(xs: &[f64]) -> Option<f64> {
    if xs.len() < 2 {
        return None;
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Some((ss / (xs.len() - 1) as f64).sqrt())
}

/// Linear-interpolation quantile (Hyndman & Fan type 7) of sorted data.
///
/// `p` is clamped to `[0, 1]`. Panics on empty input.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let p = p.clamp(0.0, 1.0);
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn standard_normal_cdf(x: f64) -> f64 {
    // Normal::new(0, 1) cannot fail
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

/// Formats like C's `%.{digits}g`: `digits` significant figures, trailing
/// zeros trimmed, exponent form outside `[1e-4, 1e{digits})`.
pub fn format_sig(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sd_of_two_points() {
        let sd = sample_sd(&[100.0, 110.0]).unwrap();
        assert!((sd - 7.0710678).abs() < 1e-6);
        assert!(sample_sd(&[1.0]).is_none());
    }

    #[test]
    fn type7_quantiles() {
        let xs: Vec<f64> = (1..=8).map(f64::from).collect();
        assert_eq!(quantile_sorted(&xs, 0.25), 2.75);
        assert_eq!(quantile_sorted(&xs, 0.5), 4.5);
        assert_eq!(quantile_sorted(&xs, 0.75), 6.25);
        assert_eq!(quantile_sorted(&xs, 0.0), 1.0);
        assert_eq!(quantile_sorted(&xs, 1.0), 8.0);
    }

    #[test]
    fn sig6_formatting() {
        assert_eq!(format_sig(151.66234, 6), "151.662");
        assert_eq!(format_sig(0.1, 6), "0.1");
        assert_eq!(format_sig(-2.0, 6), "-2");
        assert_eq!(format_sig(1234567.0, 6), "1.23457e+06");
        assert_eq!(format_sig(0.000012345678, 6), "1.23457e-05");
        assert_eq!(format_sig(0.0, 6), "0");
        assert_eq!(format_sig(999999.7, 6), "1e+06");
    }
}
