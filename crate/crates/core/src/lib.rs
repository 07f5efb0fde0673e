//! Thermal-sum phenology as a stopped random walk.
//!
//! * [`model`]: closed-form hitting-time approximations and sensitivities
//! * [`sim`]: exact path simulation and the Monte Carlo harness
//! * [`regime`]: winter level and spring warming estimates from daily series
//! * [`fitting`]: forcing-experiment WLS fit and binned location-scale grids
//! * [`data_io`]: CSV ingest, station matching, and the analysis join

pub mod data_io;
pub mod fitting;
pub mod model;
pub mod reference;
pub mod regime;
pub mod report;
pub mod sim;
pub mod stats;

pub use model::{HittingTimeApprox, Regime, RegimeParams};
pub use sim::{SimulationResult, TemperatureProcessSpec};
