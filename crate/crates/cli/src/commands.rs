use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, Write};

use chrono::Datelike;
use serde_json::json;

use thermalsum_core::data_io::{
    build_analysis_rows, midrange_series, parse_temperature_csv, read_analysis_csv,
    read_observations_csv, write_analysis_csv, Parsed, TagFilter, TemperatureUnits,
};
use thermalsum_core::fitting::{
    bin_location_scale, format_grid_table, quantile_bin_edges, write_grid_csv, CellStat,
    LocationScaleObs,
};
use thermalsum_core::model::{approx as approx_model, HittingTimeApprox, RegimeParams};
use thermalsum_core::regime::{estimate_regime, write_estimates_csv};
use thermalsum_core::sim::{
    histogram, run_replicates, write_histogram_csv, write_hitting_times, write_summary_csv,
    NoiseLaw, SimulationResult, SummaryRow, TemperatureProcessSpec,
};
use thermalsum_core::stats::format_sig;

use crate::args::{
    ApproxArgs, BinArgs, EstimateArgs, JoinArgs, NoiseArg, OutputFormat, ParamArgs, SimulateArgs,
    TrendArg, UnitsArg,
};
use crate::rundir::{run_name, RunDir};
use crate::CliError;

fn params(p: &ParamArgs) -> Result<RegimeParams, CliError> {
    Ok(RegimeParams::new(p.alpha, p.beta, p.sigma, p.tau)?)
}

fn units(u: UnitsArg) -> TemperatureUnits {
    match u {
        UnitsArg::Celsius => TemperatureUnits::Celsius,
        UnitsArg::Tenths => TemperatureUnits::Tenths,
    }
}

pub(crate) fn require_seed(seed: Option<u64>, what: &str) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::Usage(format!("{what} is stochastic and requires --seed")))
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| format_sig(x, 6)).unwrap_or_default()
}

fn regime_name(a: &HittingTimeApprox) -> &'static str {
    match a.regime {
        thermalsum_core::Regime::Winter => "winter",
        thermalsum_core::Regime::Spring => "spring",
    }
}

fn quality_name(a: &HittingTimeApprox) -> &'static str {
    match a.quality {
        thermalsum_core::model::ApproxQuality::Asymptotic => "asymptotic",
        thermalsum_core::model::ApproxQuality::ShortHorizon => "short-horizon",
    }
}

pub fn approx(args: &ApproxArgs) -> Result<(), CliError> {
    let p = params(&args.params)?;
    let a = approx_model(&p)?;
    let mut out = std::io::stdout().lock();
    match args.format {
        OutputFormat::Csv => {
            writeln!(
                out,
                "alpha,beta,sigma,tau,regime,mean,variance,sd,crossing_time,linearized_variance,quality"
            )?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{}",
                format_sig(p.alpha(), 6),
                format_sig(p.beta(), 6),
                format_sig(p.sigma(), 6),
                format_sig(p.tau(), 6),
                regime_name(&a),
                format_sig(a.mean, 6),
                format_sig(a.variance, 6),
                format_sig(a.sd(), 6),
                opt(a.crossing_time),
                opt(a.linearized_variance),
                quality_name(&a),
            )?;
        }
        OutputFormat::Json => {
            let v = json!({
                "params": p,
                "regime": regime_name(&a),
                "mean": a.mean,
                "variance": a.variance,
                "sd": a.sd(),
                "crossing_time": a.crossing_time,
                "linearized_variance": a.linearized_variance,
                "quality": quality_name(&a),
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        OutputFormat::Table => {
            writeln!(out, "regime    {}", regime_name(&a))?;
            writeln!(out, "mean      {}", format_sig(a.mean, 6))?;
            writeln!(out, "variance  {}", format_sig(a.variance, 6))?;
            writeln!(out, "sd        {}", format_sig(a.sd(), 6))?;
            if let Some(m) = a.crossing_time {
                writeln!(out, "m(tau)    {}", format_sig(m, 6))?;
            }
            if let Some(v) = a.linearized_variance {
                writeln!(out, "lin. var  {}", format_sig(v, 6))?;
            }
            writeln!(out, "quality   {}", quality_name(&a))?;
        }
    }
    Ok(())
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let seed = require_seed(args.mc.seed, "simulate")?;
    let p = params(&args.params)?;
    let base = match args.trend {
        TrendArg::Linear => TemperatureProcessSpec::linear(p.alpha(), p.beta(), p.sigma()),
        TrendArg::Piecewise => TemperatureProcessSpec::piecewise(p.alpha(), p.beta(), p.sigma()),
    };
    let law = match args.noise {
        NoiseArg::Gaussian => NoiseLaw::Gaussian,
        NoiseArg::TwoPoint => NoiseLaw::TwoPoint,
    };
    let spec = base
        .with_noise_law(law)
        .with_clipping(args.clip)
        .with_max_horizon(args.max_horizon);
    if args.bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let cfg = crate::reproduce::mc_config(&args.mc, seed)?;

    let run = RunDir::create(
        &args.output.out_dir,
        &run_name("simulate", Some(seed)),
        args.output.force,
    )?;
    let times = run_replicates(&spec, p.tau(), &cfg)?;
    let mut result = SimulationResult::from_hitting_times(times, p.tau(), seed, spec.max_horizon);
    // the closed forms describe the unclipped linear-trend walk
    if args.trend == TrendArg::Linear && !args.clip {
        if let Ok(theory) = approx_model(&p) {
            result = result.standardize(theory);
        }
    }
    let row = SummaryRow::new(p.alpha(), p.beta(), p.sigma(), &result);
    run.write("summary.csv", |w| write_summary_csv(w, &[row]))?;
    run.write("hitting_times.csv", |w| {
        write_hitting_times(w, &result.hitting_times)
    })?;
    let xs: Vec<f64> = result.hitting_times.iter().map(|&t| f64::from(t)).collect();
    let lo = f64::from(
        *result
            .hitting_times
            .iter()
            .min()
            .expect("at least one replicate"),
    );
    let hi = f64::from(
        *result
            .hitting_times
            .iter()
            .max()
            .expect("at least one replicate"),
    ) + 1.0;
    run.write("histogram.csv", |w| {
        write_histogram_csv(w, &histogram(&xs, lo, hi, args.bins))
    })?;

    let mut out = std::io::stdout().lock();
    match args.format {
        OutputFormat::Csv => write_summary_csv(&mut out, &[row])?,
        OutputFormat::Json => {
            let v = json!({
                "alpha": row.alpha, "beta": row.beta, "tau": row.tau, "sigma": row.sigma,
                "replicates": row.replicates, "seed": row.seed,
                "mean": row.mean, "sd": row.sd, "ks": row.ks,
                "theory": result.theory,
            });
            writeln!(out, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        OutputFormat::Table => {
            writeln!(out, "replicates  {}", row.replicates)?;
            writeln!(out, "mean        {}", format_sig(row.mean, 6))?;
            writeln!(out, "sd          {}", format_sig(row.sd, 6))?;
            if let Some(t) = result.theory {
                writeln!(out, "approx mean {}", format_sig(t.mean, 6))?;
                writeln!(out, "approx sd   {}", format_sig(t.sd(), 6))?;
            }
            if let Some(ks) = row.ks {
                writeln!(out, "KS          {}", format_sig(ks, 6))?;
            }
        }
    }
    eprintln!("wrote {}", run.path().display());
    Ok(())
}

fn report_rejections<T>(what: &str, parsed: &Parsed<T>) {
    if !parsed.rejected.is_empty() {
        eprintln!("{what}: skipped {} malformed row(s)", parsed.rejected.len());
        for r in parsed.rejected.iter().take(5) {
            eprintln!("  line {}: {}", r.line, r.reason);
        }
    }
}

pub fn estimate(args: &EstimateArgs) -> Result<(), CliError> {
    let parsed = parse_temperature_csv(&args.input, units(args.units))?;
    report_rejections("temperatures", &parsed);
    let keys: BTreeSet<(String, i32)> = parsed
        .rows
        .iter()
        .map(|r| (r.station_id.clone(), r.date.year()))
        .collect();
    let mut estimates = Vec::new();
    let mut skipped = 0usize;
    for (station, year) in &keys {
        match estimate_regime(&midrange_series(&parsed.rows, station, *year)) {
            Ok(e) => estimates.push(e),
            Err(_) => skipped += 1,
        }
    }
    let run = RunDir::create(&args.output.out_dir, "estimate", args.output.force)?;
    run.write("estimates.csv", |w| write_estimates_csv(w, &estimates))?;
    println!(
        "{} station-years estimated, {} skipped as incomplete",
        estimates.len(),
        skipped
    );
    eprintln!("wrote {}", run.path().display());
    Ok(())
}

pub fn join(args: &JoinArgs) -> Result<(), CliError> {
    let temps = parse_temperature_csv(&args.temperatures, units(args.units))?;
    report_rejections("temperatures", &temps);
    let obs = read_observations_csv(BufReader::new(File::open(&args.observations)?))?;
    report_rejections("observations", &obs);
    let filter = TagFilter {
        species: args.species.clone(),
        phenophase: args.phenophase.clone(),
    };
    let report = build_analysis_rows(&obs.rows, &temps.rows, &filter);
    let run = RunDir::create(&args.output.out_dir, "join", args.output.force)?;
    run.write("analysis.csv", |w| write_analysis_csv(w, &report.rows))?;
    println!(
        "{} rows joined; {} filtered out, {} without a station within range, {} incomplete station-years",
        report.rows.len(),
        report.filtered_out,
        report.unmatched,
        report.incomplete
    );
    eprintln!("wrote {}", run.path().display());
    Ok(())
}

pub fn bin(args: &BinArgs) -> Result<(), CliError> {
    let parsed = read_analysis_csv(BufReader::new(File::open(&args.input)?))?;
    report_rejections("analysis", &parsed);
    let obs: Vec<LocationScaleObs> = parsed
        .rows
        .iter()
        .map(|r| LocationScaleObs {
            alpha: r.alpha_hat,
            beta: r.beta_hat,
            bloom_doy: f64::from(r.bloom_doy),
        })
        .collect();
    let a: Vec<f64> = obs.iter().map(|o| o.alpha).collect();
    let b: Vec<f64> = obs.iter().map(|o| o.beta).collect();
    let grid = bin_location_scale(
        &obs,
        &quantile_bin_edges(&a, args.bins)?,
        &quantile_bin_edges(&b, args.bins)?,
    );
    let tables = grid_tables(&grid);
    let run = RunDir::create(&args.output.out_dir, "bin", args.output.force)?;
    run.write("grid.csv", |w| write_grid_csv(w, &grid))?;
    run.write_text("tables.txt", &tables)?;
    print!("{tables}");
    eprintln!("wrote {}", run.path().display());
    Ok(())
}

pub(crate) fn grid_tables(grid: &thermalsum_core::fitting::BinnedGrid) -> String {
    let mut s = String::new();
    for (title, stat) in [
        ("mean bloom day", CellStat::Mean),
        ("sd of bloom day", CellStat::Sd),
        ("observations", CellStat::Count),
    ] {
        s.push_str(title);
        s.push('\n');
        s.push_str(&format_grid_table(grid, stat));
        s.push('\n');
    }
    if grid.alpha_edges.degenerate || grid.beta_edges.degenerate {
        s.push_str("note: coincident quantile edges; some bins are empty\n");
    }
    s
}
