mod chart;
mod commands;
mod config;
mod table;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Moving-load bridge dynamics and integration time-step calibration.
#[derive(Parser)]
#[command(name = "bridgestep", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one dynamic analysis and print its impact factor.
    Analyze(AnalyzeArgs),
    /// Run a parameter sweep from a config file into results.csv.
    Sweep(SweepArgs),
    /// Pick the proper time step per condition from sweep results.
    SelectDt(SelectDtArgs),
    /// Aggregate k statistics from a selection table into summary.json.
    Calibrate(CalibrateArgs),
    /// Print the recommended time step k*L/V for a span and speed.
    Recommend(RecommendArgs),
    /// Emit per-(span, distance) impact-factor charts from results.csv.
    Plot(PlotArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Span length in meters.
    #[arg(long)]
    span: f64,
    /// First flexural natural frequency in Hz.
    #[arg(long)]
    f1: f64,
    /// Modal damping ratio.
    #[arg(long, default_value_t = 0.0)]
    damping: f64,
    /// Retained mode count.
    #[arg(long, default_value_t = 5)]
    modes: usize,
    /// Load per axle in metric tons.
    #[arg(long, default_value_t = 20.0)]
    axle_load_ton: f64,
    /// Number of axles.
    #[arg(long, default_value_t = 10)]
    axles: usize,
    /// Axle spacing in meters.
    #[arg(long, default_value_t = 13.0)]
    axle_distance: f64,
    /// Crossing speed in km/h.
    #[arg(long)]
    speed_kmh: f64,
    /// Integration time step in seconds.
    #[arg(long)]
    dt: f64,
    /// Write the midpoint deflection time series to this CSV path.
    #[arg(long)]
    history: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Study configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for results.csv and manifest.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (falls back to BRIDGESTEP_WORKERS, then the config,
    /// then all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct SelectDtArgs {
    /// results.csv from `sweep`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Impact-factor tolerance.
    #[arg(long, default_value_t = bridgestep::DEFAULT_IF_TOLERANCE)]
    tol: f64,
    /// Output selection.csv path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CalibrateArgs {
    /// selection.csv from `select-dt`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output summary path.
    #[arg(long, default_value = "summary.json")]
    out: PathBuf,
}

#[derive(Args)]
struct RecommendArgs {
    /// Span length in meters.
    #[arg(long)]
    span: f64,
    /// Crossing speed in km/h.
    #[arg(long)]
    speed_kmh: f64,
    /// Calibration coefficient.
    #[arg(long, default_value_t = bridgestep::RECOMMENDED_K)]
    k: f64,
}

#[derive(Args)]
struct PlotArgs {
    /// results.csv from `sweep`.
    #[arg(long = "in")]
    input: PathBuf,
    /// Output directory for chart files.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => commands::analyze(&commands::AnalyzeOpts {
            span: args.span,
            f1: args.f1,
            damping: args.damping,
            modes: args.modes,
            axle_load_ton: args.axle_load_ton,
            axles: args.axles,
            axle_distance: args.axle_distance,
            speed_kmh: args.speed_kmh,
            dt: args.dt,
            history: args.history,
        }),
        Command::Sweep(args) => commands::sweep(&args.config, args.out, args.workers),
        Command::SelectDt(args) => commands::select_dt(&args.input, args.tol, &args.out),
        Command::Calibrate(args) => commands::calibrate(&args.input, &args.out),
        Command::Recommend(args) => commands::recommend(args.span, args.speed_kmh, args.k),
        Command::Plot(args) => commands::plot(&args.input, &args.out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
