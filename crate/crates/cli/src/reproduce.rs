use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use thermalsum_core::data_io::{
    build_analysis_rows, parse_temperature_csv, read_analysis_csv, read_observations_csv,
    write_analysis_csv, AnalysisRow, TagFilter, TemperatureUnits,
};
use thermalsum_core::fitting::{
    bin_by_quartiles, bin_location_scale, fit_winter_wls, read_forcing_csv, BinEdges,
    LocationScaleObs,
};
use thermalsum_core::model::RegimeParams;
use thermalsum_core::reference::WALNUT_FORCING_CSV;
use thermalsum_core::report::{format_matrix, format_sim2_tables, format_walnut_table};
use thermalsum_core::sim::{
    histogram, run_simulation_1_grid, run_simulation_2, write_histogram_csv, write_hitting_times,
    write_summary_csv, MonteCarloConfig, Sim2Design, SimulationResult, SummaryRow, SIM1_ALPHAS,
    SIM1_BETAS, SIM1_TAUS,
};
use thermalsum_core::stats::format_sig;

use crate::args::{MonteCarloArgs, ReproduceArgs, Target};
use crate::checks::{self, CheckLine};
use crate::commands::{grid_tables, require_seed};
use crate::rundir::{run_name, RunDir};
use crate::CliError;

/// Joined lilac table (`site,year,alpha,beta,bloom_doy`) under the data directory.
pub const LILAC_ANALYSIS_FILE: &str = "lilac_analysis.csv";
/// Raw inputs joined on the fly when no analysis table is present.
pub const LILAC_TEMPERATURES_FILE: &str = "temperatures.csv";
pub const LILAC_OBSERVATIONS_FILE: &str = "lilac_observations.csv";
pub const LILAC_SPECIES: &str = "common lilac";
pub const LILAC_PHENOPHASE: &str = "full bloom";

const HISTOGRAM_BINS: usize = 40;
const HISTOGRAM_RANGE: f64 = 4.0;

pub(crate) fn mc_config(mc: &MonteCarloArgs, seed: u64) -> Result<MonteCarloConfig, CliError> {
    if mc.replicates == 0 {
        return Err(CliError::Usage("--replicates must be at least 1".into()));
    }
    let cfg = MonteCarloConfig::new(mc.replicates, seed);
    Ok(match mc.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(n) => cfg.with_threads(n),
        None => cfg,
    })
}

pub fn reproduce(args: &ReproduceArgs) -> Result<(), CliError> {
    let lines = match args.target {
        Target::Sim1 => sim1(args)?,
        Target::Sim2 => sim2(args)?,
        Target::Walnut => walnut(args)?,
        Target::LilacBins => lilac(args)?,
    };
    if !args.check {
        return Ok(());
    }
    for l in &lines {
        println!("{l}");
    }
    let failed = lines.iter().filter(|l| !l.passed).count();
    if failed > 0 {
        return Err(CliError::CheckFailed(failed));
    }
    Ok(())
}

fn run_dir(args: &ReproduceArgs, seed: Option<u64>) -> Result<RunDir, CliError> {
    let name = run_name(&format!("reproduce-{}", args.target.name()), seed);
    RunDir::create(&args.output.out_dir, &name, args.output.force)
}

fn cell_label(alpha: f64, beta: f64, tau: f64) -> String {
    format!(
        "alpha{}_beta{}_tau{}",
        format_sig(alpha, 6),
        format_sig(beta, 6),
        format_sig(tau, 6)
    )
}

fn sim1(args: &ReproduceArgs) -> Result<Vec<CheckLine>, CliError> {
    let seed = require_seed(args.mc.seed, "reproduce sim1")?;
    let cfg = mc_config(&args.mc, seed)?;
    let run = run_dir(args, Some(seed))?;
    let grid = run_simulation_1_grid(&cfg)?;

    let rows: Vec<SummaryRow> = grid
        .iter()
        .map(|(p, r)| SummaryRow::new(p.alpha(), p.beta(), p.sigma(), r))
        .collect();
    run.write("summary.csv", |w| write_summary_csv(w, &rows))?;
    run.write_text("theory.csv", &theory_csv(&grid))?;
    for (p, r) in &grid {
        let label = cell_label(p.alpha(), p.beta(), p.tau());
        if let Some(z) = &r.z_values {
            let bins = histogram(z, -HISTOGRAM_RANGE, HISTOGRAM_RANGE, HISTOGRAM_BINS);
            run.write(&format!("histograms/{label}.csv"), |w| {
                write_histogram_csv(w, &bins)
            })?;
        }
        if args.raw {
            run.write(&format!("hitting_times/{label}.txt"), |w| {
                write_hitting_times(w, &r.hitting_times)
            })?;
        }
    }
    let tables = sim1_tables(&grid);
    run.write_text("tables.txt", &tables)?;
    print!("{tables}");
    eprintln!("wrote {}", run.path().display());
    Ok(checks::sim1_checks(&grid))
}

fn theory_csv(grid: &[(RegimeParams, SimulationResult)]) -> String {
    let mut s =
        String::from("alpha,beta,tau,sigma,approx_mean,approx_sd,crossing_time,linearized_sd\n");
    let opt = |v: Option<f64>| v.map(|x| format_sig(x, 6)).unwrap_or_default();
    for (p, r) in grid {
        let Some(t) = r.theory else { continue };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            format_sig(p.alpha(), 6),
            format_sig(p.beta(), 6),
            format_sig(p.tau(), 6),
            format_sig(p.sigma(), 6),
            format_sig(t.mean, 6),
            format_sig(t.sd(), 6),
            opt(t.crossing_time),
            opt(t.linearized_variance.map(f64::sqrt)),
        );
    }
    s
}

fn sim1_tables(grid: &[(RegimeParams, SimulationResult)]) -> String {
    let lookup = |a: f64, b: f64, t: f64| {
        grid.iter()
            .find(|(p, _)| p.alpha() == a && p.beta() == b && p.tau() == t)
            .map(|(_, r)| r)
    };
    let mut out = String::new();
    for &tau in &SIM1_TAUS {
        for (name, pick) in [
            (
                "mean",
                (|r: &SimulationResult| r.mean) as fn(&SimulationResult) -> f64,
            ),
            ("approx mean", |r| r.theory.map_or(f64::NAN, |t| t.mean)),
            ("sd", |r| r.sd),
            ("approx sd", |r| r.theory.map_or(f64::NAN, |t| t.sd())),
            ("KS", |r| r.ks.unwrap_or(f64::NAN)),
        ] {
            let values: Vec<Vec<f64>> = SIM1_ALPHAS
                .iter()
                .map(|&a| {
                    SIM1_BETAS
                        .iter()
                        .map(|&b| lookup(a, b, tau).map_or(f64::NAN, pick))
                        .collect()
                })
                .collect();
            let title = format!("{name}, tau={}", format_sig(tau, 6));
            out.push_str(&format_matrix(
                &title,
                "alpha \\ beta",
                &SIM1_ALPHAS,
                &SIM1_BETAS,
                &values,
            ));
            out.push('\n');
        }
    }
    out
}

fn sim2(args: &ReproduceArgs) -> Result<Vec<CheckLine>, CliError> {
    let seed = require_seed(args.mc.seed, "reproduce sim2")?;
    let cfg = mc_config(&args.mc, seed)?;
    let run = run_dir(args, Some(seed))?;
    let cells = run_simulation_2(&Sim2Design::default(), &cfg)?;

    let rows: Vec<SummaryRow> = cells
        .iter()
        .map(|c| SummaryRow::new(c.alpha, c.beta, c.sigma, &c.result))
        .collect();
    run.write("summary.csv", |w| write_summary_csv(w, &rows))?;
    if args.raw {
        for c in &cells {
            run.write(
                &format!("hitting_times/{}.txt", cell_label(c.alpha, c.beta, c.tau)),
                |w| write_hitting_times(w, &c.result.hitting_times),
            )?;
        }
    }
    let tables = format_sim2_tables(&cells);
    run.write_text("tables.txt", &tables)?;
    print!("{tables}");
    eprintln!("wrote {}", run.path().display());
    Ok(checks::sim2_checks(&cells))
}

fn walnut(args: &ReproduceArgs) -> Result<Vec<CheckLine>, CliError> {
    let run = run_dir(args, None)?;
    let obs = read_forcing_csv(WALNUT_FORCING_CSV.as_bytes())?;
    let fit = fit_winter_wls(&obs)?;

    let mut csv = String::from("alpha,n,mean,sd,fitted_mean,fitted_sd,mean_residual\n");
    for (i, o) in obs.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            format_sig(o.alpha, 6),
            o.n,
            format_sig(o.mean_days, 6),
            format_sig(o.sd_days, 6),
            format_sig(fit.fitted_means[i], 6),
            format_sig(fit.fitted_sds[i], 6),
            format_sig(fit.mean_residuals[i], 6),
        );
    }
    run.write_text("fit.csv", &csv)?;
    run.write_text(
        "estimates.csv",
        &format!(
            "tau_hat,sigma_hat,weighted_r2\n{},{},{}\n",
            format_sig(fit.tau_hat, 6),
            format_sig(fit.sigma_hat, 6),
            format_sig(fit.weighted_r_squared, 6)
        ),
    )?;
    let table = format_walnut_table(&obs, &fit);
    run.write_text("tables.txt", &table)?;
    print!("{table}");
    eprintln!("wrote {}", run.path().display());
    Ok(checks::walnut_checks(&obs, &fit))
}

enum LilacSource {
    Analysis(PathBuf),
    Raw {
        temperatures: PathBuf,
        observations: PathBuf,
    },
}

fn find_lilac_data(dir: Option<&Path>) -> Option<LilacSource> {
    let dir = dir?;
    let analysis = dir.join(LILAC_ANALYSIS_FILE);
    if analysis.is_file() {
        return Some(LilacSource::Analysis(analysis));
    }
    let temperatures = dir.join(LILAC_TEMPERATURES_FILE);
    let observations = dir.join(LILAC_OBSERVATIONS_FILE);
    (temperatures.is_file() && observations.is_file()).then_some(LilacSource::Raw {
        temperatures,
        observations,
    })
}

fn lilac(args: &ReproduceArgs) -> Result<Vec<CheckLine>, CliError> {
    match find_lilac_data(args.data_dir.as_deref()) {
        Some(source) => lilac_observed(args, source),
        None if args.synthetic => lilac_synthetic(args),
        None => Err(CliError::MissingData(format!(
            "no {LILAC_ANALYSIS_FILE} or {LILAC_TEMPERATURES_FILE} + {LILAC_OBSERVATIONS_FILE} under {}; \
             set --data-dir / THERMALSUM_DATA_DIR or pass --synthetic",
            args.data_dir
                .as_deref()
                .map_or("<unset data dir>".into(), |p| p.display().to_string())
        ))),
    }
}

fn lilac_observed(args: &ReproduceArgs, source: LilacSource) -> Result<Vec<CheckLine>, CliError> {
    let rows = match &source {
        LilacSource::Analysis(path) => {
            let parsed = read_analysis_csv(BufReader::new(File::open(path)?))?;
            if !parsed.rejected.is_empty() {
                eprintln!(
                    "skipped {} malformed analysis row(s)",
                    parsed.rejected.len()
                );
            }
            parsed.rows
        }
        LilacSource::Raw {
            temperatures,
            observations,
        } => {
            let temps = parse_temperature_csv(temperatures, TemperatureUnits::Celsius)?;
            let obs = read_observations_csv(BufReader::new(File::open(observations)?))?;
            let filter = TagFilter {
                species: Some(LILAC_SPECIES.into()),
                phenophase: Some(LILAC_PHENOPHASE.into()),
            };
            let report = build_analysis_rows(&obs.rows, &temps.rows, &filter);
            eprintln!(
                "joined {} rows ({} filtered, {} unmatched, {} incomplete)",
                report.rows.len(),
                report.filtered_out,
                report.unmatched,
                report.incomplete
            );
            report.rows
        }
    };
    let run = run_dir(args, None)?;
    run.write("analysis.csv", |w| write_analysis_csv(w, &rows))?;
    let grid = bin_by_quartiles(&to_obs(&rows))?;
    run.write("grid.csv", |w| {
        thermalsum_core::fitting::write_grid_csv(w, &grid)
    })?;
    let tables = grid_tables(&grid);
    run.write_text("tables.txt", &tables)?;
    print!("{tables}");
    eprintln!("wrote {}", run.path().display());
    Ok(checks::lilac_checks(&grid))
}

fn to_obs(rows: &[AnalysisRow]) -> Vec<LocationScaleObs> {
    rows.iter()
        .map(|r| LocationScaleObs {
            alpha: r.alpha_hat,
            beta: r.beta_hat,
            bloom_doy: f64::from(r.bloom_doy),
        })
        .collect()
}

/// Edges halfway between consecutive grid values, so each bin holds exactly
/// one design value.
fn midpoint_edges(values: &[f64]) -> BinEdges {
    let mut edges = vec![values[0]];
    edges.extend(values.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    edges.push(values[values.len() - 1]);
    BinEdges::from_edges(edges)
}

/// Simulated bloom days at the piecewise design points pushed through the
/// analysis-table writer, reader and binner.
fn lilac_synthetic(args: &ReproduceArgs) -> Result<Vec<CheckLine>, CliError> {
    let seed = require_seed(args.mc.seed, "reproduce lilac-bins --synthetic")?;
    let cfg = mc_config(&args.mc, seed)?;
    let design = Sim2Design::default();
    let run = RunDir::create(
        &args.output.out_dir,
        &run_name("reproduce-lilac-bins-synthetic", Some(seed)),
        args.output.force,
    )?;
    let cells = run_simulation_2(&design, &cfg)?;
    let alpha_edges = midpoint_edges(&design.alphas);
    let beta_edges = midpoint_edges(&design.betas);

    let mut lines = Vec::new();
    let mut tables = String::new();
    for &tau in &design.taus {
        let mut rows = Vec::new();
        for c in cells.iter().filter(|c| c.tau == tau) {
            for (i, &t) in c.result.hitting_times.iter().enumerate() {
                let bloom_doy = u16::try_from(t)
                    .ok()
                    .filter(|d| (1..=366).contains(d))
                    .ok_or_else(|| {
                        CliError::Usage(format!("simulated day {t} does not fit a calendar year"))
                    })?;
                rows.push(AnalysisRow {
                    site_id: format!(
                        "a{}-b{}-r{i}",
                        format_sig(c.alpha, 6),
                        format_sig(c.beta, 6)
                    ),
                    year: 2000,
                    alpha_hat: c.alpha,
                    beta_hat: c.beta,
                    bloom_doy,
                });
            }
        }
        let tau_tag = format_sig(tau, 6);
        let path = run.write(&format!("analysis_tau{tau_tag}.csv"), |w| {
            write_analysis_csv(w, &rows)
        })?;
        let parsed = read_analysis_csv(BufReader::new(File::open(path)?))?;
        if !parsed.rejected.is_empty() {
            return Err(CliError::Usage(format!(
                "{} synthetic rows failed to round-trip",
                parsed.rejected.len()
            )));
        }
        let grid = bin_location_scale(&to_obs(&parsed.rows), &alpha_edges, &beta_edges);
        run.write(&format!("grid_tau{tau_tag}.csv"), |w| {
            thermalsum_core::fitting::write_grid_csv(w, &grid)
        })?;
        let _ = writeln!(tables, "tau={tau_tag}");
        tables.push_str(&grid_tables(&grid));
        lines.extend(checks::synthetic_grid_checks(
            tau,
            &design.alphas,
            &design.betas,
            &grid,
        ));
    }
    run.write_text("tables.txt", &tables)?;
    print!("{tables}");
    eprintln!("wrote {}", run.path().display());
    Ok(lines)
}
