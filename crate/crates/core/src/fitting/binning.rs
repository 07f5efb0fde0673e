//! Quantile-edged alpha x beta grid of bloom-date location and scale.

use std::fmt::Write as _;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::FitError;
use crate::stats::{format_sig, mean, quantile_sorted, sample_sd};

/// Bin boundaries: `edges[0]` is the data minimum and `edges[k]` the maximum.
///
/// Bin 0 is `[edges[0], edges[1]]`; bin `j > 0` is `(edges[j], edges[j+1]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinEdges {
    pub edges: Vec<f64>,
    /// Some adjacent edges coincide, so at least one bin is empty.
    pub degenerate: bool,
}

impl BinEdges {
    pub fn from_edges(edges: Vec<f64>) -> Self {
        let degenerate = edges.windows(2).any(|w| w[0] >= w[1]);
        Self { edges, degenerate }
    }

    pub fn bins(&self) -> usize {
        self.edges.len() - 1
    }

    /// Bin index for `v`, and whether it had to be clamped into an outer bin.
    pub fn locate(&self, v: f64) -> (usize, bool) {
        let k = self.bins();
        if v < self.edges[0] {
            return (0, true);
        }
        for j in 0..k {
            if v <= self.edges[j + 1] {
                return (j, false);
            }
        }
        (k - 1, true)
    }

    pub fn label(&self, bin: usize) -> String {
        let open = if bin == 0 { '[' } else { '(' };
        format!(
            "{open}{}, {}]",
            edge_label(self.edges[bin]),
            edge_label(self.edges[bin + 1])
        )
    }
}

fn edge_label(x: f64) -> String {
    let s = format!("{x:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

/// `k - 1` interior type-7 quantiles at `j / k`, bracketed by min and max.
pub fn quantile_bin_edges(values: &[f64], k: usize) -> Result<BinEdges, FitError> {
    if k < 2 {
        return Err(FitError::InvalidBinCount(k));
    }
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.len() < k {
        return Err(FitError::TooFewValues {
            needed: k,
            got: sorted.len(),
        });
    }
    sorted.sort_unstable_by(f64::total_cmp);
    let edges = (0..=k)
        .map(|j| quantile_sorted(&sorted, j as f64 / k as f64))
        .collect();
    Ok(BinEdges::from_edges(edges))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocationScaleObs {
    pub alpha: f64,
    pub beta: f64,
    pub bloom_doy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub count: usize,
    pub mean: Option<f64>,
    /// Missing for fewer than two observations.
    pub sd: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStat {
    Mean,
    Sd,
    Count,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinnedGrid {
    pub alpha_edges: BinEdges,
    pub beta_edges: BinEdges,
    /// `cells[row][col]`, rows indexing alpha bins and columns beta bins.
    pub cells: Vec<Vec<CellSummary>>,
    /// Observations whose alpha or beta fell outside the outer edges.
    pub clamped: usize,
}

impl BinnedGrid {
    pub fn total(&self) -> usize {
        self.cells.iter().flatten().map(|c| c.count).sum()
    }

    pub fn cell(&self, row: usize, col: usize) -> &CellSummary {
        &self.cells[row][col]
    }

    pub fn stat(&self, row: usize, col: usize, stat: CellStat) -> Option<f64> {
        let c = self.cell(row, col);
        match stat {
            CellStat::Mean => c.mean,
            CellStat::Sd => c.sd,
            CellStat::Count => Some(c.count as f64),
        }
    }
}

pub fn bin_location_scale(
    observations: &[LocationScaleObs],
    alpha_edges: &BinEdges,
    beta_edges: &BinEdges,
) -> BinnedGrid {
    let (rows, cols) = (alpha_edges.bins(), beta_edges.bins());
    let mut members: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); cols]; rows];
    let mut clamped = 0;
    for o in observations {
        let (r, ca) = alpha_edges.locate(o.alpha);
        let (c, cb) = beta_edges.locate(o.beta);
        if ca || cb {
            clamped += 1;
        }
        members[r][c].push(o.bloom_doy);
    }
    let cells = members
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|v| CellSummary {
                    count: v.len(),
                    mean: mean(&v),
                    sd: sample_sd(&v),
                })
                .collect()
        })
        .collect();
    BinnedGrid {
        alpha_edges: alpha_edges.clone(),
        beta_edges: beta_edges.clone(),
        cells,
        clamped,
    }
}

/// Quartile edges on both axes, then [`bin_location_scale`].
pub fn bin_by_quartiles(observations: &[LocationScaleObs]) -> Result<BinnedGrid, FitError> {
    let a: Vec<f64> = observations.iter().map(|o| o.alpha).collect();
    let b: Vec<f64> = observations.iter().map(|o| o.beta).collect();
    let ae = quantile_bin_edges(&a, 4)?;
    let be = quantile_bin_edges(&b, 4)?;
    Ok(bin_location_scale(observations, &ae, &be))
}

/// `alpha_lo,alpha_hi,beta_lo,beta_hi,count,mean,sd`
pub fn write_grid_csv<W: Write>(mut w: W, grid: &BinnedGrid) -> io::Result<()> {
    writeln!(w, "alpha_lo,alpha_hi,beta_lo,beta_hi,count,mean,sd")?;
    let opt = |v: Option<f64>| v.map(|x| format_sig(x, 6)).unwrap_or_default();
    for (r, row) in grid.cells.iter().enumerate() {
        for (c, cell) in row.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                format_sig(grid.alpha_edges.edges[r], 6),
                format_sig(grid.alpha_edges.edges[r + 1], 6),
                format_sig(grid.beta_edges.edges[c], 6),
                format_sig(grid.beta_edges.edges[c + 1], 6),
                cell.count,
                opt(cell.mean),
                opt(cell.sd),
            )?;
        }
    }
    Ok(())
}

/// Aligned text table, alpha intervals as rows and beta intervals as columns.
pub fn format_grid_table(grid: &BinnedGrid, stat: CellStat) -> String {
    let col_labels: Vec<String> = (0..grid.beta_edges.bins())
        .map(|c| grid.beta_edges.label(c))
        .collect();
    let row_labels: Vec<String> = (0..grid.alpha_edges.bins())
        .map(|r| grid.alpha_edges.label(r))
        .collect();
    let corner = "alpha \\ beta";
    let w0 = row_labels
        .iter()
        .map(String::len)
        .chain([corner.len()])
        .max()
        .unwrap_or(0);
    let wc = col_labels.iter().map(String::len).max().unwrap_or(0).max(8);
    let mut out = String::new();
    let _ = write!(out, "{corner:<w0$}");
    for l in &col_labels {
        let _ = write!(out, "  {l:>wc$}");
    }
    out.push('\n');
    for (r, label) in row_labels.iter().enumerate() {
        let _ = write!(out, "{label:<w0$}");
        for c in 0..col_labels.len() {
            let cell = match (stat, grid.stat(r, c, stat)) {
                (CellStat::Count, Some(v)) => format!("{v:.0}"),
                (_, Some(v)) => format!("{v:.2}"),
                (_, None) => "NA".to_string(),
            };
            let _ = write!(out, "  {cell:>wc$}");
        }
        out.push('\n');
    }
    out
}
