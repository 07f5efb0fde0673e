//! Two-stage weighted least squares for the winter-regime model.
//!
//! At constant forcing temperature `alpha` the response time is modelled as
//! `Normal(tau / alpha, sigma^2 tau / alpha^3)`.
//!
//! 1. `tau` comes from a no-intercept regression of observed means on
//!    `1 / alpha` with weights `n alpha^3`, the inverse of the model variance
//!    of a group mean up to the common factor `sigma^2 tau`.
//! 2. `sigma^2` comes from a no-intercept regression of observed variances on
//!    `tau_hat / alpha^3`. A sample variance with `n - 1` degrees of freedom
//!    has variance proportional to its squared expectation, so the weights are
//!    `(n - 1) / (tau_hat / alpha^3)^2`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use super::FitError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingObservation {
    /// Forcing temperature, °C.
    pub alpha: f64,
    pub n: u32,
    /// Mean response time, days.
    #[serde(rename = "mean")]
    pub mean_days: f64,
    #[serde(rename = "sd")]
    pub sd_days: f64,
}

impl ForcingObservation {
    pub fn validate(&self, row: usize) -> Result<(), FitError> {
        let bad = |reason: String| Err(FitError::InvalidObservation { row, reason });
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return bad(format!("alpha must be > 0 (got {})", self.alpha));
        }
        if self.n < 2 {
            return bad(format!("n must be >= 2 (got {})", self.n));
        }
        if !(self.sd_days.is_finite() && self.sd_days > 0.0) {
            return bad(format!("sd must be > 0 (got {})", self.sd_days));
        }
        if !self.mean_days.is_finite() {
            return bad("mean must be finite".into());
        }
        Ok(())
    }
}

/// Reads `alpha,n,mean,sd` rows and validates each one.
pub fn read_forcing_csv<R: Read>(reader: R) -> Result<Vec<ForcingObservation>, FitError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<ForcingObservation>().enumerate() {
        let obs = rec?;
        obs.validate(i + 1)?;
        out.push(obs);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WinterFit {
    pub tau_hat: f64,
    pub sigma_hat: f64,
    pub alphas: Vec<f64>,
    /// `tau_hat / alpha`
    pub fitted_means: Vec<f64>,
    /// `sigma_hat * sqrt(tau_hat / alpha^3)`
    pub fitted_sds: Vec<f64>,
    pub mean_residuals: Vec<f64>,
    pub variance_residuals: Vec<f64>,
    pub mean_weights: Vec<f64>,
    pub variance_weights: Vec<f64>,
    /// Weighted R² of the mean curve about the weighted mean response.
    pub weighted_r_squared: f64,
}

impl WinterFit {
    pub fn sigma2_hat(&self) -> f64 {
        self.sigma_hat * self.sigma_hat
    }

    pub fn predict_mean(&self, alpha: f64) -> f64 {
        self.tau_hat / alpha
    }

    pub fn predict_sd(&self, alpha: f64) -> f64 {
        self.sigma_hat * (self.tau_hat / alpha.powi(3)).sqrt()
    }
}

pub fn fit_winter_wls(observations: &[ForcingObservation]) -> Result<WinterFit, FitError> {
    for (i, o) in observations.iter().enumerate() {
        o.validate(i + 1)?;
    }
    let mut levels: Vec<f64> = observations.iter().map(|o| o.alpha).collect();
    levels.sort_unstable_by(f64::total_cmp);
    levels.dedup();
    if levels.len() < 2 {
        return Err(FitError::SingularFit(levels.len()));
    }

    let alphas: Vec<f64> = observations.iter().map(|o| o.alpha).collect();
    let means: Vec<f64> = observations.iter().map(|o| o.mean_days).collect();

    let mean_weights: Vec<f64> = observations
        .iter()
        .map(|o| f64::from(o.n) * o.alpha.powi(3))
        .collect();
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for ((&w, &a), &y) in mean_weights.iter().zip(&alphas).zip(&means) {
        let x = 1.0 / a;
        sxy += w * x * y;
        sxx += w * x * x;
    }
    let tau_hat = sxy / sxx;
    if !(tau_hat > 0.0) {
        return Err(FitError::NonPositiveEstimate {
            name: "tau",
            value: tau_hat,
        });
    }

    let design: Vec<f64> = alphas.iter().map(|a| tau_hat / a.powi(3)).collect();
    let variance_weights: Vec<f64> = observations
        .iter()
        .zip(&design)
        .map(|(o, &x)| f64::from(o.n - 1) / (x * x))
        .collect();
    let (mut vxy, mut vxx) = (0.0, 0.0);
    for ((&w, &x), o) in variance_weights.iter().zip(&design).zip(observations) {
        vxy += w * x * o.sd_days * o.sd_days;
        vxx += w * x * x;
    }
    let sigma2_hat = vxy / vxx;
    if !(sigma2_hat > 0.0) {
        return Err(FitError::NonPositiveEstimate {
            name: "sigma^2",
            value: sigma2_hat,
        });
    }
    let sigma_hat = sigma2_hat.sqrt();

    let fitted_means: Vec<f64> = alphas.iter().map(|a| tau_hat / a).collect();
    let fitted_sds: Vec<f64> = design.iter().map(|x| (sigma2_hat * x).sqrt()).collect();
    let mean_residuals: Vec<f64> = means
        .iter()
        .zip(&fitted_means)
        .map(|(y, f)| y - f)
        .collect();
    let variance_residuals: Vec<f64> = observations
        .iter()
        .zip(&design)
        .map(|(o, x)| o.sd_days * o.sd_days - sigma2_hat * x)
        .collect();

    let w_sum: f64 = mean_weights.iter().sum();
    let y_bar = mean_weights
        .iter()
        .zip(&means)
        .map(|(w, y)| w * y)
        .sum::<f64>()
        / w_sum;
    let ss_res: f64 = mean_weights
        .iter()
        .zip(&mean_residuals)
        .map(|(w, r)| w * r * r)
        .sum();
    let ss_tot: f64 = mean_weights
        .iter()
        .zip(&means)
        .map(|(w, y)| w * (y - y_bar) * (y - y_bar))
        .sum();
    let weighted_r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };

    Ok(WinterFit {
        tau_hat,
        sigma_hat,
        alphas,
        fitted_means,
        fitted_sds,
        mean_residuals,
        variance_residuals,
        mean_weights,
        variance_weights,
        weighted_r_squared,
    })
}
