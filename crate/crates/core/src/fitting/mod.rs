//! Fits of the winter-regime model to constant-forcing experiments and
//! binned location-scale summaries of observational bloom dates.

mod binning;
mod wls;

pub use binning::{
    bin_by_quartiles, bin_location_scale, format_grid_table, quantile_bin_edges, write_grid_csv,
    BinEdges, BinnedGrid, CellStat, CellSummary, LocationScaleObs,
};
pub use wls::{fit_winter_wls, read_forcing_csv, ForcingObservation, WinterFit};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least 2 distinct forcing temperatures (got {0})")]
    SingularFit(usize),
    #[error("non-positive estimate: {name} = {value}")]
    NonPositiveEstimate { name: &'static str, value: f64 },
    #[error("invalid forcing observation at row {row}: {reason}")]
    InvalidObservation { row: usize, reason: String },
    #[error("bin count must be at least 2 (got {0})")]
    InvalidBinCount(usize),
    #[error("need at least {needed} finite values to form bins (got {got})")]
    TooFewValues { needed: usize, got: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
