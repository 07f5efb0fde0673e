//! Monte Carlo harness with a fixed per-replicate seed schedule.
//!
//! Replicate `i` draws from `ChaCha8Rng::seed_from_u64(seed)` switched to
//! stream `i`, so the set of hitting times does not depend on how replicates
//! are scheduled across threads. Summaries use exact integer sums and are
//! therefore independent of reduction order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{ks_distance_normal, simulate_hitting_time, SimError, TemperatureProcessSpec};
use crate::model::{self, HittingTimeApprox, RegimeParams};

pub const SIM1_SIGMA: f64 = 20.0;
pub const SIM1_TAUS: [f64; 2] = [1000.0, 2000.0];
pub const SIM1_ALPHAS: [f64; 2] = [2.0, 4.0];
pub const SIM1_BETAS: [f64; 2] = [0.0, 0.1];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloConfig {
    pub replicates: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the ambient rayon pool.
    pub threads: Option<usize>,
}

impl MonteCarloConfig {
    pub fn new(replicates: usize, seed: u64) -> Self {
        Self {
            replicates,
            seed,
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads.max(1));
        self
    }
}

pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Hitting times for `cfg.replicates` independent paths, in replicate order.
pub fn run_replicates(
    spec: &TemperatureProcessSpec,
    tau: f64,
    cfg: &MonteCarloConfig,
) -> Result<Vec<u32>, SimError> {
    spec.validate()?;
    if cfg.replicates == 0 {
        return Err(SimError::NoReplicates);
    }
    let work = || {
        (0..cfg.replicates as u64)
            .into_par_iter()
            .map(|i| simulate_hitting_time(spec, tau, &mut replicate_rng(cfg.seed, i)))
            .collect::<Result<Vec<_>, _>>()
    };
    match cfg.threads {
        None => work(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()?
            .install(work),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SimulationResult {
    pub hitting_times: Vec<u32>,
    pub replicates: usize,
    pub tau: f64,
    pub mean: f64,
    /// Sample sd (`n - 1` denominator); 0 for a single replicate.
    pub sd: f64,
    /// `(nu - mean_theory) / sd_theory`; `None` when no theory is attached or
    /// its variance is zero.
    pub z_values: Option<Vec<f64>>,
    /// KS distance of `z_values` from the standard normal.
    pub ks: Option<f64>,
    pub theory: Option<HittingTimeApprox>,
    pub seed: u64,
    pub max_horizon: u32,
}

impl SimulationResult {
    pub fn from_hitting_times(
        hitting_times: Vec<u32>,
        tau: f64,
        seed: u64,
        max_horizon: u32,
    ) -> Self {
        let (mean, sd) = summarize(&hitting_times);
        Self {
            replicates: hitting_times.len(),
            hitting_times,
            tau,
            mean,
            sd,
            z_values: None,
            ks: None,
            theory: None,
            seed,
            max_horizon,
        }
    }

    /// Attaches a normal approximation and standardizes against it.
    pub fn standardize(mut self, theory: HittingTimeApprox) -> Self {
        self.theory = Some(theory);
        if theory.variance > 0.0 {
            let sd = theory.sd();
            let z: Vec<f64> = self
                .hitting_times
                .iter()
                .map(|&n| (f64::from(n) - theory.mean) / sd)
                .collect();
            self.ks = ks_distance_normal(&z).ok();
            self.z_values = Some(z);
        } else {
            self.z_values = None;
            self.ks = None;
        }
        self
    }

    pub fn variance(&self) -> f64 {
        self.sd * self.sd
    }

    /// Hitting times in ascending order.
    pub fn sorted_hitting_times(&self) -> Vec<u32> {
        let mut v = self.hitting_times.clone();
        v.sort_unstable();
        v
    }
}

/// Mean and sample sd from exact integer moments.
fn summarize(times: &[u32]) -> (f64, f64) {
    let n = times.len() as u128;
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let s1: u128 = times.iter().map(|&t| u128::from(t)).sum();
    let s2: u128 = times.iter().map(|&t| u128::from(t) * u128::from(t)).sum();
    let mean = s1 as f64 / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    // n * s2 - s1^2 >= 0 by Cauchy-Schwarz, exact in integers
    let num = n * s2 - s1 * s1;
    let var = num as f64 / (n * (n - 1)) as f64;
    (mean, var.sqrt())
}

/// One linear-trend Gaussian configuration, standardized against the
/// closed-form approximation for its regime.
pub fn run_simulation_1(
    params: &RegimeParams,
    cfg: &MonteCarloConfig,
) -> Result<SimulationResult, SimError> {
    let theory = model::approx(params)?;
    let spec = TemperatureProcessSpec::linear(params.alpha(), params.beta(), params.sigma());
    let times = run_replicates(&spec, params.tau(), cfg)?;
    Ok(
        SimulationResult::from_hitting_times(times, params.tau(), cfg.seed, spec.max_horizon)
            .standardize(theory),
    )
}

/// The full 8-point grid over `SIM1_TAUS x SIM1_ALPHAS x SIM1_BETAS`, ordered
/// by alpha, then beta, then tau.
pub fn run_simulation_1_grid(
    cfg: &MonteCarloConfig,
) -> Result<Vec<(RegimeParams, SimulationResult)>, SimError> {
    let mut out = Vec::with_capacity(8);
    for &alpha in &SIM1_ALPHAS {
        for &beta in &SIM1_BETAS {
            for &tau in &SIM1_TAUS {
                let params = RegimeParams::new(alpha, beta, SIM1_SIGMA, tau)?;
                out.push((params, run_simulation_1(&params, cfg)?));
            }
        }
    }
    Ok(out)
}

/// Parameter grid for the piecewise-seasonal experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Sim2Design {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    pub taus: Vec<f64>,
    pub sigma: f64,
}

impl Default for Sim2Design {
    fn default() -> Self {
        Self {
            alphas: vec![4.0, 8.0, 10.0],
            betas: vec![0.2, 0.4, 0.8],
            taus: vec![1000.0, 2000.0],
            sigma: 20.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Sim2Cell {
    pub alpha: f64,
    pub beta: f64,
    pub tau: f64,
    pub sigma: f64,
    pub result: SimulationResult,
}

/// Runs every (tau, alpha, beta) cell of `design`, ordered by tau, then
/// alpha, then beta. Cells share the replicate noise streams.
pub fn run_simulation_2(
    design: &Sim2Design,
    cfg: &MonteCarloConfig,
) -> Result<Vec<Sim2Cell>, SimError> {
    let mut cells =
        Vec::with_capacity(design.taus.len() * design.alphas.len() * design.betas.len());
    for &tau in &design.taus {
        for &alpha in &design.alphas {
            for &beta in &design.betas {
                let spec = TemperatureProcessSpec::piecewise(alpha, beta, design.sigma);
                let times = run_replicates(&spec, tau, cfg)?;
                cells.push(Sim2Cell {
                    alpha,
                    beta,
                    tau,
                    sigma: design.sigma,
                    result: SimulationResult::from_hitting_times(
                        times,
                        tau,
                        cfg.seed,
                        spec.max_horizon,
                    ),
                });
            }
        }
    }
    Ok(cells)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: u64,
}

/// Equal-width histogram over `[lo, hi)`; values outside the range are
/// counted in the nearest outer bin.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<HistogramBin> {
    assert!(bins > 0 && hi > lo, "histogram needs bins > 0 and hi > lo");
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    for &v in values.iter().filter(|v| !v.is_nan()) {
        let idx = ((v - lo) / width).floor();
        let idx = if idx < 0.0 {
            0
        } else {
            (idx as usize).min(bins - 1)
        };
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            left: lo + i as f64 * width,
            right: lo + (i + 1) as f64 * width,
            count,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summarize_matches_float_formula() {
        let t = [3u32, 5, 5, 9, 100];
        let (m, sd) = summarize(&t);
        let f: Vec<f64> = t.iter().map(|&x| f64::from(x)).collect();
        assert!((m - crate::stats::mean(&f).unwrap()).abs() < 1e-12);
        assert!((sd - crate::stats::sample_sd(&f).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn noiseless_run_has_equal_times_and_no_z() {
        let params = RegimeParams::new(4.0, 0.0, 0.0, 1000.0).unwrap();
        let r = run_simulation_1(&params, &MonteCarloConfig::new(50, 9)).unwrap();
        assert!(r.hitting_times.iter().all(|&t| t == 251));
        assert_eq!(r.sd, 0.0);
        assert!(r.z_values.is_none());
        assert!(r.ks.is_none());
    }

    #[test]
    fn zero_replicates_rejected() {
        let spec = TemperatureProcessSpec::linear(4.0, 0.0, 1.0);
        assert!(matches!(
            run_replicates(&spec, 10.0, &MonteCarloConfig::new(0, 1)),
            Err(SimError::NoReplicates)
        ));
    }

    #[test]
    fn histogram_counts_everything() {
        let v = [-10.0, -0.1, 0.0, 0.3, 0.99, 5.0];
        let h = histogram(&v, -1.0, 1.0, 4);
        assert_eq!(h.iter().map(|b| b.count).sum::<u64>(), 6);
        assert_eq!(h[0].count, 1);
        assert_eq!(h[1].count, 1);
        assert_eq!(h[2].count, 2);
        assert_eq!(h[3].count, 2);
        assert_eq!(h[3].right, 1.0);
    }

    #[test]
    fn thread_count_does_not_change_output() {
        let spec = TemperatureProcessSpec::piecewise(4.0, 0.4, 20.0);
        let a = run_replicates(
            &spec,
            1000.0,
            &MonteCarloConfig::new(500, 7).with_threads(1),
        )
        .unwrap();
        let b = run_replicates(
            &spec,
            1000.0,
            &MonteCarloConfig::new(500, 7).with_threads(4),
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
