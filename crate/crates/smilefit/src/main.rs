//! Thin command-line front end over [`smilefit::cli`].
//!
//! Exit codes: 0 success, 1 partial failure (skipped tickers or failed
//! arbitrage conditions), 2 config/parse errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use smilefit::baselines::McConfig;
use smilefit::calibration::ModelTag;
use smilefit::cli::{
    cmd_calibrate, cmd_check, cmd_report, cmd_simulate, CheckArgs, RunConfig, SimulateArgs,
};
use smilefit::metrics::CurvatureMode;

#[derive(Parser)]
#[command(
    name = "smilefit",
    about = "Volatility-smile calibration, simulation, and arbitrage checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Calibrate smile models to an option-chain CSV, one run per ticker.
    Calibrate {
        /// Chain CSV (ticker,quote_date,expiry,strike,implied_vol,underlying_close,rate).
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output directory root.
        #[arg(long)]
        outdir: Option<PathBuf>,
        /// Comma-separated model list (ads,sabr,fsabr).
        #[arg(long)]
        models: Option<String>,
        /// Trial budget per model.
        #[arg(long)]
        trials: Option<usize>,
        /// Seed for calibration and the Monte-Carlo objective.
        #[arg(long)]
        seed: Option<u64>,
        /// Monte-Carlo paths for the fractional-SABR objective.
        #[arg(long)]
        paths: Option<usize>,
        /// Monte-Carlo time steps.
        #[arg(long)]
        steps: Option<usize>,
        /// Curvature stencil: printed | weighted.
        #[arg(long)]
        curvature: Option<CurvatureMode>,
        /// JSON config file; flags override its fields.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Aggregate per-ticker metric files into summary and plot data.
    Report {
        /// Directory previously written by `calibrate`.
        #[arg(long)]
        outdir: PathBuf,
        /// Skip SVG rendering.
        #[arg(long)]
        no_svg: bool,
    },
    /// Price a fractional-SABR smile by Monte Carlo and write it as CSV.
    Simulate {
        #[arg(long, default_value_t = 100.0)]
        spot: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rate: f64,
        /// Time to expiry in years.
        #[arg(long, default_value_t = 30.0 / 365.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.2)]
        alpha0: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rho: f64,
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        #[arg(long, default_value_t = 0.5)]
        hurst: f64,
        /// Comma-separated strike list.
        #[arg(long, default_value = "80,90,95,100,105,110,120")]
        strikes: String,
        #[arg(long, default_value_t = 100_000)]
        paths: usize,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output CSV path.
        #[arg(long, default_value = "smile.csv")]
        out: PathBuf,
    },
    /// Verify the arbitrage conditions for a stored parameter file.
    Check {
        /// Flat JSON parameter object {alpha,beta,delta,epsilon,k_min,spot}.
        #[arg(long)]
        params: PathBuf,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        rate: f64,
        /// Time to expiry in years.
        #[arg(long, default_value_t = 30.0 / 365.0)]
        tau: f64,
        /// Optional JSON report destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_models(spec: &str) -> smilefit::Result<Vec<ModelTag>> {
    spec.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse())
        .collect()
}

fn parse_strikes(spec: &str) -> smilefit::Result<Vec<f64>> {
    spec.split(',')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| smilefit::SmileError::InvalidInput {
                    message: format!("bad strike '{s}'"),
                })
        })
        .collect()
}

fn run() -> smilefit::Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Calibrate {
            input,
            outdir,
            models,
            trials,
            seed,
            paths,
            steps,
            curvature,
            config,
        } => {
            let mut cfg = match config {
                Some(path) => RunConfig::from_file(&path)?,
                None => RunConfig::default(),
            };
            if let Some(v) = input {
                cfg.input = v;
            }
            if let Some(v) = outdir {
                cfg.outdir = v;
            }
            if let Some(v) = models {
                cfg.models = parse_models(&v)?;
            }
            if let Some(v) = trials {
                cfg.n_trials = v;
            }
            if let Some(v) = seed {
                cfg.seed = v;
                cfg.mc.seed = v;
            }
            if let Some(v) = paths {
                cfg.mc.n_paths = v;
            }
            if let Some(v) = steps {
                cfg.mc.n_steps = v;
            }
            if let Some(v) = curvature {
                cfg.curvature = v;
            }
            let outcome = cmd_calibrate(&cfg)?;
            println!(
                "calibrated {} slice(s), {} failed",
                outcome.succeeded.len(),
                outcome.failed.len()
            );
            for (label, reason) in &outcome.failed {
                eprintln!("  {label}: {reason}");
            }
            Ok(if outcome.failed.is_empty() { 0 } else { 1 })
        }
        Command::Report { outdir, no_svg } => {
            let n = cmd_report(&outdir, !no_svg)?;
            println!(
                "summarized {n} ticker row(s) into {}",
                outdir.join("summary.csv").display()
            );
            Ok(0)
        }
        Command::Simulate {
            spot,
            rate,
            tau,
            alpha0,
            rho,
            nu,
            hurst,
            strikes,
            paths,
            steps,
            seed,
            out,
        } => {
            let args = SimulateArgs {
                spot,
                rate,
                tau,
                alpha0,
                rho,
                nu,
                hurst,
                strikes: parse_strikes(&strikes)?,
                mc: McConfig {
                    n_paths: paths,
                    n_steps: steps,
                    seed,
                },
                out,
            };
            cmd_simulate(&args)?;
            println!("wrote {}", args.out.display());
            Ok(0)
        }
        Command::Check {
            params,
            rate,
            tau,
            out,
        } => {
            let report = cmd_check(&CheckArgs {
                params,
                rate,
                tau,
                out,
            })?;
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
