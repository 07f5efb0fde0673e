//! Closed-form hitting-time approximations for the thermal-sum model.
//!
//! Daily effective temperature is `X_i = alpha + beta * i + eps_i` with
//! i.i.d. noise of mean zero and variance `sigma^2`. The bloom day is the
//! first `n` whose cumulative sum strictly exceeds the threshold `tau`.
//!
//! Two regimes are distinguished by the exact value of `beta`:
//!
//! * **Winter** (`beta == 0`): stationary temperatures, cumulative sum grows
//!   linearly and the hitting time is approximately
//!   `Normal(tau / alpha, sigma^2 tau / alpha^3)`.
//! * **Spring** (`beta > 0`): linearly warming temperatures, cumulative sum
//!   grows quadratically and the hitting time concentrates around the
//!   deterministic crossing time with variance shrinking like `tau^{-1/2}`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Deterministic crossing times below this many days are flagged as outside
/// the asymptotic range of the spring approximation.
pub const SPRING_MIN_CROSSING_DAYS: f64 = 30.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("alpha must be finite and > 0 (got {0})")]
    NonPositiveAlpha(f64),
    #[error("beta must be finite and >= 0 (got {0})")]
    NegativeBeta(f64),
    #[error("sigma must be finite and >= 0 (got {0})")]
    NegativeSigma(f64),
    #[error("tau must be finite and > 0 (got {0})")]
    NonPositiveTau(f64),
    #[error("{op} requires the {expected:?} regime but beta = {beta}")]
    WrongRegime {
        op: &'static str,
        expected: Regime,
        beta: f64,
    },
    #[error(
        "spring approximation has non-positive mean {mean} (tau = {tau} is too small relative to alpha/beta)"
    )]
    ThresholdTooSmall { mean: f64, tau: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    Winter,
    Spring,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Winter => f.write_str("winter"),
            Regime::Spring => f.write_str("spring"),
        }
    }
}

/// Parameters of the daily temperature process and the thermal-sum threshold.
///
/// Units: `alpha` in °C/day, `beta` in °C/day², `sigma` in °C, `tau` in
/// degree-days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    alpha: f64,
    beta: f64,
    sigma: f64,
    tau: f64,
}

impl RegimeParams {
    pub fn new(alpha: f64, beta: f64, sigma: f64, tau: f64) -> Result<Self, ModelError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ModelError::NonPositiveAlpha(alpha));
        }
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(ModelError::NegativeBeta(beta));
        }
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(ModelError::NegativeSigma(sigma));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(ModelError::NonPositiveTau(tau));
        }
        Ok(Self {
            alpha,
            beta,
            sigma,
            tau,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// Exact classification: any strictly positive `beta` is spring.
    pub fn regime(&self) -> Regime {
        if self.beta == 0.0 {
            Regime::Winter
        } else {
            Regime::Spring
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self, ModelError> {
        Self::new(alpha, self.beta, self.sigma, self.tau)
    }

    pub fn with_beta(&self, beta: f64) -> Result<Self, ModelError> {
        Self::new(self.alpha, beta, self.sigma, self.tau)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self, ModelError> {
        Self::new(self.alpha, self.beta, sigma, self.tau)
    }

    pub fn with_tau(&self, tau: f64) -> Result<Self, ModelError> {
        Self::new(self.alpha, self.beta, self.sigma, tau)
    }
}

/// Whether the approximation is inside its asymptotic range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ApproxQuality {
    Asymptotic,
    /// Spring regime with a deterministic crossing time under
    /// [`SPRING_MIN_CROSSING_DAYS`].
    ShortHorizon,
}

/// Normal approximation to the hitting-time distribution, in days.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HittingTimeApprox {
    pub mean: f64,
    pub variance: f64,
    pub regime: Regime,
    /// Spring only: `sigma^2 m / (alpha + beta m)^2` evaluated at the exact
    /// crossing time, before the large-`tau` simplification.
    pub linearized_variance: Option<f64>,
    /// Spring only: exact root of the deterministic cumulative sum.
    pub crossing_time: Option<f64>,
    pub quality: ApproxQuality,
}

impl HittingTimeApprox {
    pub fn sd(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Real-valued day at which the deterministic cumulative sum reaches `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossingTime {
    pub m_tau: f64,
    /// `alpha / beta + 1/2`; `None` in the winter regime where it is undefined.
    pub gamma: Option<f64>,
}

/// Expected cumulative temperature after `n` days: `alpha n + beta n (n+1) / 2`.
pub fn deterministic_cumsum(params: &RegimeParams, n: u64) -> f64 {
    deterministic_cumsum_real(params, n as f64)
}

/// Real-argument extension of [`deterministic_cumsum`], used to check roots.
pub fn deterministic_cumsum_real(params: &RegimeParams, n: f64) -> f64 {
    params.alpha * n + 0.5 * params.beta * n * (n + 1.0)
}

pub fn gamma(params: &RegimeParams) -> Option<f64> {
    match params.regime() {
        Regime::Winter => None,
        Regime::Spring => Some(params.alpha / params.beta + 0.5),
    }
}

pub fn crossing_time(params: &RegimeParams) -> CrossingTime {
    match gamma(params) {
        None => CrossingTime {
            m_tau: params.tau / params.alpha,
            gamma: None,
        },
        Some(g) => {
            let b = params.beta;
            // Rationalized root of (b/2) m^2 + b g m - tau = 0; avoids
            // cancellation when tau is small relative to b g^2.
            let bg = b * g;
            let m_tau = 2.0 * params.tau / (bg + (bg * bg + 2.0 * b * params.tau).sqrt());
            CrossingTime {
                m_tau,
                gamma: Some(g),
            }
        }
    }
}

pub fn approx_winter(params: &RegimeParams) -> Result<HittingTimeApprox, ModelError> {
    if params.regime() != Regime::Winter {
        return Err(ModelError::WrongRegime {
            op: "approx_winter",
            expected: Regime::Winter,
            beta: params.beta,
        });
    }
    let RegimeParams {
        alpha, sigma, tau, ..
    } = *params;
    Ok(HittingTimeApprox {
        mean: tau / alpha,
        variance: sigma * sigma * tau / alpha.powi(3),
        regime: Regime::Winter,
        linearized_variance: None,
        crossing_time: None,
        quality: ApproxQuality::Asymptotic,
    })
}

pub fn approx_spring(params: &RegimeParams) -> Result<HittingTimeApprox, ModelError> {
    let Some(g) = gamma(params) else {
        return Err(ModelError::WrongRegime {
            op: "approx_spring",
            expected: Regime::Spring,
            beta: params.beta,
        });
    };
    let RegimeParams {
        alpha,
        beta,
        sigma,
        tau,
    } = *params;
    let mean = (2.0 * tau / beta).sqrt() - g;
    if mean <= 0.0 {
        return Err(ModelError::ThresholdTooSmall { mean, tau });
    }
    let s2 = sigma * sigma;
    let variance = s2 / (beta.powf(1.5) * (2.0 * tau).sqrt());
    let m = crossing_time(params).m_tau;
    let linearized = s2 * m / (alpha + beta * m).powi(2);
    let quality = if m < SPRING_MIN_CROSSING_DAYS {
        ApproxQuality::ShortHorizon
    } else {
        ApproxQuality::Asymptotic
    };
    Ok(HittingTimeApprox {
        mean,
        variance,
        regime: Regime::Spring,
        linearized_variance: Some(linearized),
        crossing_time: Some(m),
        quality,
    })
}

/// Dispatches on the exact regime of `params`.
pub fn approx(params: &RegimeParams) -> Result<HittingTimeApprox, ModelError> {
    match params.regime() {
        Regime::Winter => approx_winter(params),
        Regime::Spring => approx_spring(params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Wrt {
    Alpha,
    Beta,
}

/// Leading-order sensitivity of the expected bloom day.
///
/// Winter: `d/d alpha = -tau / alpha^2`. Spring: `d/d beta = -sqrt(2 tau / beta^3) / 2`
/// (derivative of the dominant `sqrt(2 tau / beta)` term) and
/// `d/d alpha = -1 / beta`. Asking for `d/d beta` in the winter regime is an
/// error. All returned values are strictly negative.
pub fn sensitivity(params: &RegimeParams, wrt: Wrt) -> Result<f64, ModelError> {
    let RegimeParams {
        alpha, beta, tau, ..
    } = *params;
    match (params.regime(), wrt) {
        (Regime::Winter, Wrt::Alpha) => Ok(-tau / (alpha * alpha)),
        (Regime::Winter, Wrt::Beta) => Err(ModelError::WrongRegime {
            op: "sensitivity wrt beta",
            expected: Regime::Spring,
            beta,
        }),
        (Regime::Spring, Wrt::Alpha) => Ok(-1.0 / beta),
        (Regime::Spring, Wrt::Beta) => Ok(-0.5 * (2.0 * tau / beta.powi(3)).sqrt()),
    }
}

/// Exact partial derivative of the reported approximate mean.
///
/// Differs from [`sensitivity`] only for spring `d/d beta`, where the
/// `-alpha / beta` term of the mean contributes `+alpha / beta^2`.
pub fn mean_gradient(params: &RegimeParams, wrt: Wrt) -> Result<f64, ModelError> {
    match (params.regime(), wrt) {
        (Regime::Spring, Wrt::Beta) => {
            let lead = sensitivity(params, Wrt::Beta)?;
            Ok(lead + params.alpha / (params.beta * params.beta))
        }
        _ => sensitivity(params, wrt),
    }
}
