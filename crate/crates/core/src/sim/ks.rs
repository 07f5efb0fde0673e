//! One-sample Kolmogorov–Smirnov distance.

use super::SimError;
use crate::stats::standard_normal_cdf;

/// Sup-norm distance between the empirical CDF of `samples` and `cdf`.
///
/// Ties are handled by evaluating the ECDF on both sides of each distinct
/// value. NaN samples are rejected along with empty input.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64, SimError> {
    if samples.is_empty() || samples.iter().any(|x| x.is_nan()) {
        return Err(SimError::EmptySample);
    }
    let mut xs = samples.to_vec();
    xs.sort_unstable_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < xs.len() {
        let x = xs[i];
        let mut j = i;
        while j < xs.len() && xs[j] == x {
            j += 1;
        }
        let f = cdf(x);
        let below = i as f64 / n;
        let at = j as f64 / n;
        d = d.max((f - below).abs()).max((at - f).abs());
        i = j;
    }
    Ok(d.min(1.0))
}

pub fn ks_distance_normal(samples: &[f64]) -> Result<f64, SimError> {
    ks_distance(samples, standard_normal_cdf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ContinuousCDF, Normal};

    #[test]
    fn normal_quantiles_are_close() {
        let n = 999;
        let normal = Normal::new(0.0, 1.0).unwrap();
        let xs: Vec<f64> = (1..=n)
            .map(|i| normal.inverse_cdf(i as f64 / (n + 1) as f64))
            .collect();
        assert!(ks_distance_normal(&xs).unwrap() < 0.002);
    }

    #[test]
    fn point_mass_at_median() {
        assert!((ks_distance_normal(&[0.0, 0.0, 0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn disjoint_support() {
        let xs: Vec<f64> = (0..100).map(|i| -1e6 - i as f64).collect();
        assert!(ks_distance_normal(&xs).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn empty_rejected() {
        assert!(matches!(
            ks_distance_normal(&[]),
            Err(SimError::EmptySample)
        ));
        assert!(ks_distance_normal(&[f64::NAN, 1.0]).is_err());
    }
}
