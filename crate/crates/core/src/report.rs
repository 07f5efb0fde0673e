//! Plain-text tables in the row-by-column layout used for the published
//! summaries.

use std::fmt::Write as _;

use crate::fitting::{ForcingObservation, WinterFit};
use crate::sim::Sim2Cell;
use crate::stats::format_sig;

/// `values[row][col]` with numeric row and column headers, 2 decimals.
pub fn format_matrix(
    title: &str,
    corner: &str,
    rows: &[f64],
    cols: &[f64],
    values: &[Vec<f64>],
) -> String {
    let row_labels: Vec<String> = rows.iter().map(|&r| format_sig(r, 6)).collect();
    let col_labels: Vec<String> = cols.iter().map(|&c| format_sig(c, 6)).collect();
    let w0 = row_labels
        .iter()
        .map(String::len)
        .chain([corner.len()])
        .max()
        .unwrap_or(0);
    let wc = 8;
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = write!(out, "{corner:<w0$}");
    for l in &col_labels {
        let _ = write!(out, "  {l:>wc$}");
    }
    out.push('\n');
    for (label, row) in row_labels.iter().zip(values) {
        let _ = write!(out, "{label:<w0$}");
        for v in row {
            let _ = write!(out, "  {v:>wc$.2}");
        }
        out.push('\n');
    }
    out
}

/// Four panels: mean and sd for each tau, rows alpha and columns beta.
pub fn format_sim2_tables(cells: &[Sim2Cell]) -> String {
    let mut taus: Vec<f64> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    for c in cells {
        for (set, v) in [
            (&mut taus, c.tau),
            (&mut alphas, c.alpha),
            (&mut betas, c.beta),
        ] {
            if !set.contains(&v) {
                set.push(v);
            }
        }
    }
    let lookup = |tau: f64, a: f64, b: f64| {
        cells
            .iter()
            .find(|c| c.tau == tau && c.alpha == a && c.beta == b)
            .map(|c| &c.result)
    };
    let mut out = String::new();
    for &tau in &taus {
        for (name, pick) in [
            (
                "mean",
                (|r: &crate::sim::SimulationResult| r.mean) as fn(&_) -> f64,
            ),
            ("sd", |r| r.sd),
        ] {
            let values: Vec<Vec<f64>> = alphas
                .iter()
                .map(|&a| {
                    betas
                        .iter()
                        .map(|&b| lookup(tau, a, b).map_or(f64::NAN, pick))
                        .collect()
                })
                .collect();
            let title = format!("{name}, tau={}", format_sig(tau, 6));
            out.push_str(&format_matrix(
                &title,
                "alpha \\ beta",
                &alphas,
                &betas,
                &values,
            ));
            out.push('\n');
        }
    }
    out
}

/// Observed and fitted forcing-experiment summaries side by side.
pub fn format_walnut_table(obs: &[ForcingObservation], fit: &WinterFit) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>6}  {:>4}  {:>8}  {:>8}  {:>10}  {:>10}",
        "alpha", "n", "mean", "sd", "fit_mean", "fit_sd"
    );
    for (i, o) in obs.iter().enumerate() {
        let _ = writeln!(
            out,
            "{:>6}  {:>4}  {:>8.2}  {:>8.2}  {:>10.2}  {:>10.2}",
            format_sig(o.alpha, 6),
            o.n,
            o.mean_days,
            o.sd_days,
            fit.fitted_means[i],
            fit.fitted_sds[i]
        );
    }
    let _ = writeln!(
        out,
        "tau_hat = {}  sigma_hat = {}  weighted R^2 = {}",
        format_sig(fit.tau_hat, 6),
        format_sig(fit.sigma_hat, 6),
        format_sig(fit.weighted_r_squared, 6)
    );
    out
}
