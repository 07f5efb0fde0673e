use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "thermalsum",
    version,
    about = "Hitting-time approximations, simulations and estimation for thermal-sum phenology"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normal approximation to the hitting time for one parameter set
    Approx(ApproxArgs),
    /// Monte Carlo hitting times for one parameter set
    Simulate(SimulateArgs),
    /// Per station-year regime estimates from daily temperature records
    Estimate(EstimateArgs),
    /// Match phenology observations to stations and attach regime estimates
    Join(JoinArgs),
    /// Quantile-binned bloom-date location and scale grid
    Bin(BinArgs),
    /// Regenerate a published table
    Reproduce(ReproduceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Mean daily temperature on day 0, °C above base
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    /// Daily warming rate, °C per day (0 selects the winter regime)
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    /// Thermal-sum threshold, degree-days
    #[arg(long, allow_negative_numbers = true)]
    pub tau: f64,
    /// Sd of daily temperature noise
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Root directory for run directories
    #[arg(long, default_value = "runs")]
    pub out_dir: PathBuf,
    /// Replace an existing run directory
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Clone, Args)]
pub struct MonteCarloArgs {
    /// RNG seed (required for stochastic runs)
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub replicates: usize,
    /// Worker threads; defaults to the available parallelism
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TrendArg {
    /// alpha + beta * day
    Linear,
    /// alpha until day 90, then rising at beta per day
    Piecewise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Gaussian,
    TwoPoint,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub mc: MonteCarloArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[arg(long, value_enum, default_value_t = TrendArg::Linear)]
    pub trend: TrendArg,
    #[arg(long, value_enum, default_value_t = NoiseArg::Gaussian)]
    pub noise: NoiseArg,
    /// Set negative daily temperatures to zero
    #[arg(long)]
    pub clip: bool,
    #[arg(long, default_value_t = thermalsum_core::sim::DEFAULT_MAX_HORIZON)]
    pub max_horizon: u32,
    /// Histogram bins over the observed hitting-time range
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum UnitsArg {
    /// Degrees Celsius
    Celsius,
    /// Tenths of a degree Celsius
    Tenths,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Daily station CSV: station_id,date,lat,lon,tmax,tmin
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = UnitsArg::Celsius)]
    pub units: UnitsArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct JoinArgs {
    /// Daily station CSV
    #[arg(long)]
    pub temperatures: PathBuf,
    /// Phenology CSV: site_id,lat,lon,year,bloom_doy,species,phenophase
    #[arg(long)]
    pub observations: PathBuf,
    #[arg(long, value_enum, default_value_t = UnitsArg::Celsius)]
    pub units: UnitsArg,
    #[arg(long)]
    pub species: Option<String>,
    #[arg(long)]
    pub phenophase: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BinArgs {
    /// Analysis CSV: site,year,alpha,beta,bloom_doy
    #[arg(long)]
    pub input: PathBuf,
    /// Quantile bins per axis
    #[arg(long, default_value_t = 4)]
    pub bins: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    /// Linear-trend normality grid
    Sim1,
    /// Piecewise-seasonal mean and sd grid
    Sim2,
    /// Walnut forcing-experiment fit
    Walnut,
    /// Lilac bloom-date binning
    LilacBins,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Sim1 => "sim1",
            Target::Sim2 => "sim2",
            Target::Walnut => "walnut",
            Target::LilacBins => "lilac-bins",
        }
    }
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(value_enum)]
    pub target: Target,
    #[command(flatten)]
    pub mc: MonteCarloArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Exit with status 1 if any reproduction tolerance fails
    #[arg(long)]
    pub check: bool,
    /// Also write every replicate hitting time
    #[arg(long)]
    pub raw: bool,
    /// Directory holding pre-downloaded observational data
    #[arg(long, env = "THERMALSUM_DATA_DIR")]
    pub data_dir: Option<PathBuf>,
    /// lilac-bins: use simulated data at known parameters when no data are found
    #[arg(long)]
    pub synthetic: bool,
}
