//! Published summary values used as reproduction targets.

/// Constant-forcing walnut budburst summaries: `alpha,n,mean,sd`.
pub const WALNUT_FORCING_CSV: &str = include_str!("../fixtures/walnut_forcing.csv");

pub const SIM2_ALPHAS: [f64; 3] = [4.0, 8.0, 10.0];
pub const SIM2_BETAS: [f64; 3] = [0.2, 0.4, 0.8];
pub const SIM2_TAUS: [f64; 2] = [1000.0, 2000.0];

/// Piecewise-seasonal simulation means, `[tau][alpha][beta]` in the order of
/// the constants above.
pub const SIM2_MEAN: [[[f64; 3]; 3]; 2] = [
    [
        [151.66, 136.83, 124.86],
        [114.87, 111.27, 106.85],
        [98.45, 97.20, 95.72],
    ],
    [
        [199.54, 171.15, 149.16],
        [169.81, 152.43, 137.37],
        [156.22, 143.40, 131.34],
    ],
];

/// Piecewise-seasonal simulation sds, same layout as [`SIM2_MEAN`].
pub const SIM2_SD: [[[f64; 3]; 3]; 2] = [
    [
        [15.48, 10.42, 7.21],
        [16.53, 13.27, 10.50],
        [15.94, 14.45, 12.71],
    ],
    [
        [10.96, 7.22, 4.84],
        [10.93, 7.50, 5.11],
        [10.69, 7.66, 5.36],
    ],
];

/// Lilac bin edges on alpha (rows) and beta (columns).
pub const LILAC_ALPHA_EDGES: [f64; 5] = [0.0, 0.7, 1.9, 4.7, 16.4];
pub const LILAC_BETA_EDGES: [f64; 5] = [-0.28, 0.07, 0.11, 0.15, 0.68];

/// Mean lilac full-bloom day-of-year per (alpha row, beta column).
pub const LILAC_MEAN: [[f64; 4]; 4] = [
    [157.70, 152.07, 147.60, 142.20],
    [151.12, 146.88, 141.64, 136.15],
    [136.30, 131.92, 127.58, 124.94],
    [109.56, 109.77, 107.36, 105.71],
];

/// Sd of lilac full-bloom day-of-year per (alpha row, beta column).
pub const LILAC_SD: [[f64; 4]; 4] = [
    [12.80, 11.94, 10.90, 10.95],
    [12.76, 11.91, 12.67, 12.99],
    [16.68, 14.97, 14.45, 12.55],
    [19.39, 17.06, 15.31, 12.35],
];

/// Indices of `(tau, alpha, beta)` in the simulation tables, if present.
pub fn sim2_index(tau: f64, alpha: f64, beta: f64) -> Option<(usize, usize, usize)> {
    let t = SIM2_TAUS.iter().position(|&x| x == tau)?;
    let a = SIM2_ALPHAS.iter().position(|&x| x == alpha)?;
    let b = SIM2_BETAS.iter().position(|&x| x == beta)?;
    Some((t, a, b))
}
