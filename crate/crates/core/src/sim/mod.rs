//! Exact simulation of daily temperature paths and their first-passage times.
//!
//! A path accumulates `X_i = mu_i + eps_i` day by day and stops at the first
//! day whose cumulative sum strictly exceeds the threshold. Ties continue.

mod harness;
mod ks;
mod output;

pub use harness::{
    histogram, replicate_rng, run_replicates, run_simulation_1, run_simulation_1_grid,
    run_simulation_2, HistogramBin, MonteCarloConfig, Sim2Cell, Sim2Design, SimulationResult,
    SIM1_ALPHAS, SIM1_BETAS, SIM1_SIGMA, SIM1_TAUS,
};
pub use ks::{ks_distance, ks_distance_normal};
pub use output::{write_histogram_csv, write_hitting_times, write_summary_csv, SummaryRow};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::ModelError;

pub const DEFAULT_MAX_HORIZON: u32 = 10_000;
pub const SEASONAL_BREAKPOINT_DAY: u32 = 90;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("no threshold crossing within {max_horizon} days (tau = {tau})")]
    HorizonExceeded { tau: f64, max_horizon: u32 },
    #[error("invalid process: {0}")]
    InvalidSpec(String),
    #[error("tau must be finite and > 0 (got {0})")]
    InvalidTau(f64),
    #[error("replicate count must be at least 1")]
    NoReplicates,
    #[error("sample must contain at least one finite value")]
    EmptySample,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("thread pool: {0}")]
    ThreadPool(#[from] rayon::ThreadPoolBuildError),
}

/// Deterministic daily mean temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Trend {
    /// `alpha + beta * i`
    Linear { alpha: f64, beta: f64 },
    /// `alpha` up to and including `breakpoint_day`, then
    /// `alpha + beta * (i - breakpoint_day)`, extended linearly without end.
    PiecewiseSeasonal {
        alpha: f64,
        beta: f64,
        breakpoint_day: u32,
    },
}

impl Trend {
    #[inline]
    pub fn mean_at(&self, day: u32) -> f64 {
        match *self {
            Trend::Linear { alpha, beta } => alpha + beta * f64::from(day),
            Trend::PiecewiseSeasonal {
                alpha,
                beta,
                breakpoint_day,
            } => {
                if day <= breakpoint_day {
                    alpha
                } else {
                    alpha + beta * f64::from(day - breakpoint_day)
                }
            }
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            Trend::Linear { alpha, .. } | Trend::PiecewiseSeasonal { alpha, .. } => alpha,
        }
    }

    pub fn beta(&self) -> f64 {
        match *self {
            Trend::Linear { beta, .. } | Trend::PiecewiseSeasonal { beta, .. } => beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseLaw {
    Gaussian,
    /// `+sigma` or `-sigma` with probability 1/2 each.
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureProcessSpec {
    pub trend: Trend,
    pub noise_sigma: f64,
    pub noise_law: NoiseLaw,
    /// Clip each simulated daily value at the 0 °C base temperature.
    pub clip_at_base: bool,
    pub max_horizon: u32,
}

impl TemperatureProcessSpec {
    pub fn linear(alpha: f64, beta: f64, sigma: f64) -> Self {
        Self {
            trend: Trend::Linear { alpha, beta },
            noise_sigma: sigma,
            noise_law: NoiseLaw::Gaussian,
            clip_at_base: false,
            max_horizon: DEFAULT_MAX_HORIZON,
        }
    }

    pub fn piecewise(alpha: f64, beta: f64, sigma: f64) -> Self {
        Self {
            trend: Trend::PiecewiseSeasonal {
                alpha,
                beta,
                breakpoint_day: SEASONAL_BREAKPOINT_DAY,
            },
            ..Self::linear(alpha, beta, sigma)
        }
    }

    pub fn with_noise_law(mut self, law: NoiseLaw) -> Self {
        self.noise_law = law;
        self
    }

    pub fn with_clipping(mut self, clip: bool) -> Self {
        self.clip_at_base = clip;
        self
    }

    pub fn with_max_horizon(mut self, days: u32) -> Self {
        self.max_horizon = days;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let (alpha, beta) = (self.trend.alpha(), self.trend.beta());
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(SimError::InvalidSpec(format!(
                "non-finite trend (alpha = {alpha}, beta = {beta})"
            )));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(SimError::InvalidSpec(format!(
                "noise sigma must be >= 0 (got {})",
                self.noise_sigma
            )));
        }
        if let Trend::PiecewiseSeasonal { breakpoint_day, .. } = self.trend {
            if breakpoint_day < 1 {
                return Err(SimError::InvalidSpec("breakpoint_day must be >= 1".into()));
            }
        }
        if self.max_horizon < 1 {
            return Err(SimError::InvalidSpec("max_horizon must be >= 1".into()));
        }
        Ok(())
    }

    #[inline]
    fn draw_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.noise_law {
            NoiseLaw::Gaussian => {
                let z: f64 = StandardNormal.sample(rng);
                self.noise_sigma * z
            }
            NoiseLaw::TwoPoint => {
                if rng.random::<bool>() {
                    self.noise_sigma
                } else {
                    -self.noise_sigma
                }
            }
        }
    }
}

/// The stopping day together with the partial sums that bracket `tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub day: u32,
    /// Cumulative sum through `day - 1` (0 when `day == 1`); always `<= tau`.
    pub sum_before: f64,
    /// Cumulative sum through `day`; always `> tau`.
    pub sum_at: f64,
}

/// Simulates one path and returns the first day whose cumulative sum
/// strictly exceeds `tau`.
///
/// Exactly one noise draw is consumed per simulated day, so two calls with
/// identically seeded generators share a noise path.
pub fn simulate_crossing<R: Rng + ?Sized>(
    spec: &TemperatureProcessSpec,
    tau: f64,
    rng: &mut R,
) -> Result<Crossing, SimError> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(SimError::InvalidTau(tau));
    }
    let mut sum = 0.0;
    for day in 1..=spec.max_horizon {
        let mut x = spec.trend.mean_at(day) + spec.draw_noise(rng);
        if spec.clip_at_base && x < 0.0 {
            x = 0.0;
        }
        let next = sum + x;
        if next > tau {
            return Ok(Crossing {
                day,
                sum_before: sum,
                sum_at: next,
            });
        }
        sum = next;
    }
    Err(SimError::HorizonExceeded {
        tau,
        max_horizon: spec.max_horizon,
    })
}

pub fn simulate_hitting_time<R: Rng + ?Sized>(
    spec: &TemperatureProcessSpec,
    tau: f64,
    rng: &mut R,
) -> Result<u32, SimError> {
    simulate_crossing(spec, tau, rng).map(|c| c.day)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn noiseless_strict_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let spec = TemperatureProcessSpec::linear(4.0, 0.0, 0.0);
        assert_eq!(simulate_hitting_time(&spec, 1000.0, &mut rng).unwrap(), 251);
        assert_eq!(simulate_hitting_time(&spec, 999.9, &mut rng).unwrap(), 250);
    }

    #[test]
    fn piecewise_mean_profile() {
        let t = TemperatureProcessSpec::piecewise(4.0, 0.2, 20.0).trend;
        assert_eq!(t.mean_at(1), 4.0);
        assert_eq!(t.mean_at(90), 4.0);
        assert!((t.mean_at(91) - 4.2).abs() < 1e-12);
        assert!((t.mean_at(280) - 42.0).abs() < 1e-12);
    }

    #[test]
    fn horizon_exceeded_with_clipping_and_cold_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let spec = TemperatureProcessSpec::linear(-50.0, 0.0, 1.0)
            .with_clipping(true)
            .with_max_horizon(200);
        assert!(matches!(
            simulate_hitting_time(&spec, 10.0, &mut rng),
            Err(SimError::HorizonExceeded {
                max_horizon: 200,
                ..
            })
        ));
    }

    #[test]
    fn clipping_never_decreases_sum() {
        let spec = TemperatureProcessSpec::linear(1.0, 0.0, 20.0).with_clipping(true);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let c = simulate_crossing(&spec, 300.0, &mut rng).unwrap();
            assert!(c.sum_before >= 0.0 && c.sum_before <= 300.0 && c.sum_at > 300.0);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let spec = TemperatureProcessSpec::linear(4.0, 0.0, 1.0);
        assert!(matches!(
            simulate_hitting_time(&spec, 0.0, &mut rng),
            Err(SimError::InvalidTau(_))
        ));
        assert!(TemperatureProcessSpec::linear(4.0, 0.0, -1.0)
            .validate()
            .is_err());
        let mut bad = TemperatureProcessSpec::piecewise(4.0, 0.2, 1.0);
        bad.trend = Trend::PiecewiseSeasonal {
            alpha: 4.0,
            beta: 0.2,
            breakpoint_day: 0,
        };
        assert!(bad.validate().is_err());
    }
}
