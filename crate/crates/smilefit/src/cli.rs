//! Batch drivers behind the `smilefit` binary: calibrate chains from CSV,
//! aggregate metric reports, simulate Monte-Carlo smiles, and verify fitted
//! surfaces.
//!
//! Every output file embeds the run configuration as a provenance header
//! (a `provenance` JSON field, or a leading `# provenance: ...` line in CSV),
//! and contains nothing time- or host-dependent: reruns with the same config
//! and seed are byte-identical regardless of worker count. Files are written
//! atomically (temp file + rename). Tickers are processed in parallel with
//! per-ticker seeds derived from the ticker label, so scheduling order cannot
//! leak into the outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ads::AdsParams;
use crate::arbitrage::{self, ArbReport};
use crate::baselines::{fsabr_smile_detailed, FsabrParams, McConfig, SabrParams, SmileSample};
use crate::calibration::{
    self, calibrate, rmse_objective, FitResult, ModelParams, ModelTag, SearchSpace,
};
use crate::error::{Result, SmileError};
use crate::marketdata::{self, QuoteSlice};
use crate::metrics::{self, CurvatureMode, MetricReport, SmileCurve};
use crate::plot::{render_svg, SmilePlot};
use crate::pricing::PricingContext;
use crate::rng::{hash_name, mix_seed};

/// Display names in the frozen metric-column order.
fn display_name(tag: ModelTag) -> &'static str {
    match tag {
        ModelTag::Ads => "AdS",
        ModelTag::Sabr => "SABR",
        ModelTag::Fsabr => "fSABR",
    }
}

const METRIC_NAMES: [&str; 4] = ["MSE", "MAE", "RMSCE", "ACE"];

/// Configuration of a calibration batch run.
///
/// Loaded from a JSON file, overridden by CLI flags (flags > file > defaults).
/// `mc.seed` is the Monte-Carlo objective seed; the `--seed` flag sets both
/// it and the trial seed at once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Input chain CSV.
    pub input: PathBuf,
    /// Output directory root.
    pub outdir: PathBuf,
    /// Models to calibrate.
    pub models: Vec<ModelTag>,
    /// Trial budget per model.
    pub n_trials: usize,
    /// Base seed for calibration.
    pub seed: u64,
    /// Monte-Carlo budget for the fractional-SABR objective. Final reported
    /// RMSE and metrics are re-evaluated at 4x this path count.
    pub mc: McConfig,
    /// Curvature stencil used for the ACE/RMSCE metrics.
    pub curvature: CurvatureMode,
    /// Render per-ticker SVG smile plots during `report`.
    pub svg: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: PathBuf::from("chain.csv"),
            outdir: PathBuf::from("out"),
            models: ModelTag::ALL.to_vec(),
            n_trials: 100,
            seed: 42,
            mc: McConfig::default(),
            curvature: CurvatureMode::Printed,
            svg: true,
        }
    }
}

impl RunConfig {
    /// Load a config file (JSON).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Which per-ticker pipelines succeeded.
#[derive(Debug, Clone, Default)]
pub struct CalibrateOutcome {
    /// Labels written successfully.
    pub succeeded: Vec<String>,
    /// Labels that failed, with diagnostics.
    pub failed: Vec<(String, String)>,
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn provenance_line<T: Serialize>(config: &T) -> String {
    format!(
        "# provenance: {}\n",
        serde_json::to_string(config).expect("config serializes")
    )
}

/// Everything written for one `(ticker, model)` fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitReport {
    /// Run configuration that produced this file.
    pub provenance: RunConfig,
    /// Ticker label (ticker, or `ticker_expiry` when a ticker carries
    /// several expiries).
    pub ticker: String,
    /// Expiry date of the slice.
    pub expiry: NaiveDate,
    /// Spot used by the slice.
    pub spot: f64,
    /// Rate used by the slice.
    pub rate: f64,
    /// Time to expiry in years.
    pub tau: f64,
    /// Minimum-volatility strike resolved from the observations.
    pub k_min: f64,
    /// The calibration result (best parameters, RMSE, trial history).
    pub fit: FitResult,
    /// RMSE re-evaluated at 4x the Monte-Carlo path budget (identical to
    /// `fit.rmse` for the closed-form models).
    pub rmse_final: f64,
    /// Fit metrics against the observed smile, when computable.
    pub metrics: Option<MetricReport>,
    /// Arbitrage verdicts (closed-form model only).
    pub arbitrage: Option<ArbReport>,
    /// Flat parameter object accepted by `smilefit check` (closed-form
    /// model only).
    pub ads_params: Option<AdsParams>,
}

struct GroupJob {
    label: String,
    expiry: NaiveDate,
    rows: Vec<marketdata::OptionQuoteRow>,
}

/// Model smile on the slice grid, one entry per observed point; `None` marks
/// strikes the Monte-Carlo price could not be inverted at.
fn final_model_smile(
    tag: ModelTag,
    x: &[f64],
    slice: &QuoteSlice,
    mc: &McConfig,
) -> Result<Vec<Option<f64>>> {
    match calibration::model_params(tag, x, slice)? {
        ModelParams::Fsabr(p) => {
            let ctx = PricingContext::with_tau(slice.spot, slice.rate, slice.tau)?;
            let samples: Vec<SmileSample> = fsabr_smile_detailed(&ctx, &slice.strikes(), &p, mc)?;
            Ok(samples.iter().map(|s| s.implied_vol).collect())
        }
        _ => {
            let curve = calibration::model_smile(tag, x, slice, mc)?;
            Ok(curve.points().iter().map(|p| Some(p.1)).collect())
        }
    }
}

fn metrics_on_common_grid(
    obs: &SmileCurve,
    model: &[Option<f64>],
    mode: CurvatureMode,
) -> Option<MetricReport> {
    let mut obs_pts = Vec::new();
    let mut mod_pts = Vec::new();
    for (o, m) in obs.points().iter().zip(model) {
        if let Some(v) = m {
            obs_pts.push(*o);
            mod_pts.push((o.0, *v));
        }
    }
    if obs_pts.len() < 3 {
        return None;
    }
    let obs_curve = SmileCurve::new(obs_pts).ok()?;
    let mod_curve = SmileCurve::new(mod_pts).ok()?;
    metrics::metric_report(&obs_curve, &mod_curve, mode).ok()
}

fn run_group(config: &RunConfig, job: &GroupJob) -> Result<()> {
    let slice = marketdata::build_slice(&job.rows, job.expiry)?;
    let group_seed = mix_seed(config.seed, hash_name(&job.label));
    let dir = config.outdir.join(&job.label);
    fs::create_dir_all(&dir)?;
    let obs = slice.observed_curve();
    let mc4 = McConfig {
        n_paths: config.mc.n_paths * 4,
        ..config.mc
    };

    let mut model_columns: BTreeMap<ModelTag, Vec<Option<f64>>> = BTreeMap::new();
    let mut reports: BTreeMap<ModelTag, Option<MetricReport>> = BTreeMap::new();

    for (i, &tag) in config.models.iter().enumerate() {
        let space = SearchSpace::for_model(tag);
        let fit = match calibrate(
            &slice,
            &space,
            config.n_trials,
            mix_seed(group_seed, i as u64),
            &config.mc,
        ) {
            Ok(fit) => fit,
            Err(e) => {
                log::warn!("{}: {tag} calibration failed: {e}", job.label);
                continue;
            }
        };
        let rmse_final = rmse_objective(&slice, tag, &fit.params, &mc4);
        let smile = match final_model_smile(tag, &fit.params, &slice, &mc4) {
            Ok(s) => s,
            Err(e) => {
                log::warn!("{}: {tag} final smile failed: {e}", job.label);
                vec![None; slice.points.len()]
            }
        };
        let metric = metrics_on_common_grid(&obs, &smile, config.curvature);
        if metric.is_none() {
            log::warn!(
                "{}: {tag} metrics not computable on the common grid",
                job.label
            );
        }

        let (arbitrage, ads_params) = if tag == ModelTag::Ads {
            let params = AdsParams::new(
                fit.params[0],
                fit.params[1],
                fit.params[2],
                fit.params[3],
                slice.k_min,
                slice.spot,
            )?;
            let ctx = PricingContext::with_tau(slice.spot, slice.rate, slice.tau)?;
            (Some(arbitrage::check_surface(&ctx, &params)?), Some(params))
        } else {
            (None, None)
        };

        let report = FitReport {
            provenance: config.clone(),
            ticker: job.label.clone(),
            expiry: job.expiry,
            spot: slice.spot,
            rate: slice.rate,
            tau: slice.tau,
            k_min: slice.k_min,
            fit,
            rmse_final,
            metrics: metric,
            arbitrage,
            ads_params,
        };
        let json = serde_json::to_string_pretty(&report)?;
        write_atomic(&dir.join(format!("{tag}.fit.json")), json.as_bytes())?;
        if let Some(params) = &report.ads_params {
            // Flat parameter object, directly consumable by `smilefit check`.
            let json = serde_json::to_string_pretty(params)?;
            write_atomic(&dir.join("ads.params.json"), json.as_bytes())?;
        }

        model_columns.insert(tag, smile);
        reports.insert(tag, metric);
    }

    if reports.is_empty() {
        return Err(SmileError::Calibration {
            message: "every model failed".into(),
        });
    }

    // Per-ticker metric row in the frozen column order.
    let mut csv = provenance_line(config);
    let header: Vec<String> = std::iter::once("ticker".to_string())
        .chain(ModelTag::ALL.iter().flat_map(|&t| {
            METRIC_NAMES
                .iter()
                .map(move |m| format!("{}_{m}", display_name(t)))
        }))
        .collect();
    csv.push_str(&header.join(","));
    csv.push('\n');
    csv.push_str(&job.label);
    for tag in ModelTag::ALL {
        match reports.get(&tag).copied().flatten() {
            Some(r) => {
                csv.push_str(&format!(",{},{},{},{}", r.mse, r.mae, r.rmsce, r.ace));
            }
            None => csv.push_str(",,,,"),
        }
    }
    csv.push('\n');
    write_atomic(&dir.join("metrics.csv"), csv.as_bytes())?;

    // Observed and model curves for plotting.
    let mut curves = provenance_line(config);
    curves.push_str("moneyness,observed");
    for tag in config.models.iter() {
        curves.push_str(&format!(",{tag}"));
    }
    curves.push('\n');
    for (i, pt) in obs.points().iter().enumerate() {
        curves.push_str(&format!("{},{}", pt.0, pt.1));
        for tag in config.models.iter() {
            match model_columns.get(tag).and_then(|col| col[i]) {
                Some(v) => curves.push_str(&format!(",{v}")),
                None => curves.push(','),
            }
        }
        curves.push('\n');
    }
    write_atomic(&dir.join("curves.csv"), curves.as_bytes())?;
    Ok(())
}

/// Calibrate every `(ticker, expiry)` slice of a chain file and persist
/// per-ticker fit reports, metric rows, and curve tables.
pub fn cmd_calibrate(config: &RunConfig) -> Result<CalibrateOutcome> {
    let rows = marketdata::load_chain(&config.input)?;
    let groups = marketdata::group_by_ticker_expiry(&rows);
    if groups.is_empty() {
        return Err(SmileError::invalid(format!(
            "input {} contains no data rows",
            config.input.display()
        )));
    }
    let mut ticker_counts: BTreeMap<String, usize> = BTreeMap::new();
    for (ticker, _) in groups.keys() {
        *ticker_counts.entry(ticker.clone()).or_default() += 1;
    }
    let jobs: Vec<GroupJob> = groups
        .into_iter()
        .map(|((ticker, expiry), rows)| {
            let label = if ticker_counts[&ticker] == 1 {
                ticker
            } else {
                format!("{ticker}_{expiry}")
            };
            GroupJob {
                label,
                expiry,
                rows,
            }
        })
        .collect();
    fs::create_dir_all(&config.outdir)?;

    let results: Vec<(String, Result<()>)> = jobs
        .par_iter()
        .map(|job| (job.label.clone(), run_group(config, job)))
        .collect();

    let mut outcome = CalibrateOutcome::default();
    for (label, result) in results {
        match result {
            Ok(()) => outcome.succeeded.push(label),
            Err(e) => {
                log::warn!("{label}: skipped: {e}");
                outcome.failed.push((label, e.to_string()));
            }
        }
    }
    Ok(outcome)
}

fn read_metric_rows(outdir: &Path) -> Result<Vec<(String, Vec<Option<f64>>)>> {
    let mut dirs: Vec<PathBuf> = fs::read_dir(outdir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir() && p.join("metrics.csv").exists())
        .collect();
    dirs.sort();
    let mut rows = Vec::new();
    for dir in dirs {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_path(dir.join("metrics.csv"))
            .map_err(|e| SmileError::invalid(format!("cannot read metrics.csv: {e}")))?;
        for record in reader.records() {
            let record =
                record.map_err(|e| SmileError::invalid(format!("bad metrics row: {e}")))?;
            let ticker = record.get(0).unwrap_or_default().to_string();
            let values: Vec<Option<f64>> = (1..record.len())
                .map(|i| record.get(i).and_then(|s| s.parse::<f64>().ok()))
                .collect();
            rows.push((ticker, values));
        }
    }
    Ok(rows)
}

/// Aggregate per-ticker metric rows into a summary table plus long-format
/// per-metric CSVs, and render smile-fit SVGs from the stored curves.
pub fn cmd_report(outdir: &Path, svg: bool) -> Result<usize> {
    let rows = read_metric_rows(outdir)?;
    if rows.is_empty() {
        return Err(SmileError::invalid(format!(
            "no metric files under {}",
            outdir.display()
        )));
    }
    #[derive(Serialize)]
    struct ReportProvenance<'a> {
        outdir: &'a Path,
        svg: bool,
    }
    let provenance = provenance_line(&ReportProvenance { outdir, svg });
    let n_cols = ModelTag::ALL.len() * METRIC_NAMES.len();
    let col_name = |c: usize| {
        format!(
            "{}_{}",
            display_name(ModelTag::ALL[c / METRIC_NAMES.len()]),
            METRIC_NAMES[c % METRIC_NAMES.len()]
        )
    };

    // Summary table: one statistic per row, frozen column order.
    let mut summary = provenance.clone();
    summary.push_str("statistic");
    for c in 0..n_cols {
        summary.push(',');
        summary.push_str(&col_name(c));
    }
    summary.push('\n');
    let stats: Vec<Option<metrics::SummaryStats>> = (0..n_cols)
        .map(|c| {
            let vals: Vec<f64> = rows
                .iter()
                .filter_map(|(_, v)| v.get(c).copied().flatten())
                .collect();
            metrics::summary_stats(&vals).ok()
        })
        .collect();
    type StatGetter = fn(&metrics::SummaryStats) -> f64;
    let stat_rows: [(&str, StatGetter); 7] = [
        ("mean", |s| s.mean),
        ("std", |s| s.std),
        ("min", |s| s.min),
        ("25%", |s| s.q25),
        ("50%", |s| s.median),
        ("75%", |s| s.q75),
        ("max", |s| s.max),
    ];
    for (name, get) in stat_rows {
        summary.push_str(name);
        for s in &stats {
            match s {
                Some(s) => summary.push_str(&format!(",{:.6}", get(s))),
                None => summary.push(','),
            }
        }
        summary.push('\n');
    }
    write_atomic(&outdir.join("summary.csv"), summary.as_bytes())?;

    // Long-format per-metric tables for violin/box plotting.
    let plots = outdir.join("plots");
    fs::create_dir_all(&plots)?;
    for (mi, metric) in METRIC_NAMES.iter().enumerate() {
        let mut long = provenance.clone();
        long.push_str("metric,model,ticker,value\n");
        for (ti, tag) in ModelTag::ALL.iter().enumerate() {
            let col = ti * METRIC_NAMES.len() + mi;
            for (ticker, values) in &rows {
                if let Some(Some(v)) = values.get(col) {
                    long.push_str(&format!("{metric},{},{ticker},{v}\n", display_name(*tag)));
                }
            }
        }
        write_atomic(
            &plots.join(format!("{}_long.csv", metric.to_lowercase())),
            long.as_bytes(),
        )?;
    }

    if svg {
        for (ticker, _) in &rows {
            let curves_path = outdir.join(ticker).join("curves.csv");
            if !curves_path.exists() {
                continue;
            }
            let mut reader = csv::ReaderBuilder::new()
                .comment(Some(b'#'))
                .from_path(&curves_path)
                .map_err(|e| SmileError::invalid(format!("cannot read curves.csv: {e}")))?;
            let headers = reader
                .headers()
                .map_err(|e| SmileError::invalid(format!("curves.csv header: {e}")))?
                .clone();
            let mut observed = Vec::new();
            let mut curves: Vec<(String, Vec<(f64, f64)>)> = headers
                .iter()
                .skip(2)
                .map(|h| (h.to_string(), Vec::new()))
                .collect();
            for record in reader.records() {
                let record =
                    record.map_err(|e| SmileError::invalid(format!("curves.csv row: {e}")))?;
                let m: f64 = record
                    .get(0)
                    .unwrap_or_default()
                    .parse()
                    .unwrap_or(f64::NAN);
                if let Some(Ok(v)) = record.get(1).map(str::parse::<f64>) {
                    observed.push((m, v));
                }
                for (ci, curve) in curves.iter_mut().enumerate() {
                    if let Some(Ok(v)) = record.get(2 + ci).map(str::parse::<f64>) {
                        curve.1.push((m, v));
                    }
                }
            }
            curves.retain(|(_, pts)| !pts.is_empty());
            let svg_text = format!(
                "<!-- provenance: {} -->\n{}",
                serde_json::to_string(&ReportProvenance { outdir, svg })?,
                render_svg(&SmilePlot {
                    title: ticker.clone(),
                    observed,
                    curves,
                })
            );
            write_atomic(&plots.join(format!("{ticker}.svg")), svg_text.as_bytes())?;
        }
    }
    Ok(rows.len())
}

/// Arguments of the `simulate` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Spot price.
    pub spot: f64,
    /// Continuously compounded rate.
    pub rate: f64,
    /// Time to expiry in years.
    pub tau: f64,
    /// Initial volatility level.
    pub alpha0: f64,
    /// Spot-vol correlation.
    pub rho: f64,
    /// Volatility of volatility.
    pub nu: f64,
    /// Hurst exponent of the volatility driver.
    pub hurst: f64,
    /// Strikes to price.
    pub strikes: Vec<f64>,
    /// Monte-Carlo budget and seed.
    pub mc: McConfig,
    /// Output CSV path.
    pub out: PathBuf,
}

/// Price a Monte-Carlo smile and write it as CSV
/// (`strike,price,stderr,implied_vol`).
pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let ctx = PricingContext::with_tau(args.spot, args.rate, args.tau)?;
    let params = FsabrParams::new(SabrParams::new(args.alpha0, args.rho, args.nu)?, args.hurst)?;
    let samples = fsabr_smile_detailed(&ctx, &args.strikes, &params, &args.mc)?;
    let mut csv = provenance_line(args);
    csv.push_str("strike,price,stderr,implied_vol\n");
    for s in &samples {
        match s.implied_vol {
            Some(iv) => csv.push_str(&format!("{},{},{},{iv}\n", s.strike, s.price, s.stderr)),
            None => csv.push_str(&format!("{},{},{},\n", s.strike, s.price, s.stderr)),
        }
    }
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    write_atomic(&args.out, csv.as_bytes())?;
    Ok(())
}

/// Arguments of the `check` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckArgs {
    /// Path of a flat parameter JSON object
    /// (`{alpha, beta, delta, epsilon, k_min, spot}`).
    pub params: PathBuf,
    /// Continuously compounded rate.
    pub rate: f64,
    /// Time to expiry in years.
    pub tau: f64,
    /// Optional JSON report destination.
    pub out: Option<PathBuf>,
}

/// Run the arbitrage battery on a stored parameter set, print a pass/fail
/// table, and optionally persist the report.
pub fn cmd_check(args: &CheckArgs) -> Result<ArbReport> {
    let text = fs::read_to_string(&args.params)?;
    let params: AdsParams = serde_json::from_str(&text)?;
    let ctx = PricingContext::with_tau(params.spot, args.rate, args.tau)?;
    let report = arbitrage::check_surface(&ctx, &params)?;

    println!(
        "{:<12} {:<6} {:>14}  location",
        "condition", "status", "worst"
    );
    for (name, v) in report.rows() {
        let location = match v.location {
            Some(l) => match l.maturity {
                Some(t) => format!("K={:.4}, T={:.4}", l.strike, t),
                None => format!("K={:.4}", l.strike),
            },
            None => "-".to_string(),
        };
        println!(
            "{name:<12} {:<6} {:>14.6e}  {location}",
            if v.passed { "pass" } else { "FAIL" },
            v.worst_violation
        );
    }
    println!(
        "{:<12} {:<6} {:>14.6e}  delta_ok={}",
        "admissible",
        if report.admissibility.beta_ok && report.admissibility.delta_ok {
            "pass"
        } else {
            "FAIL"
        },
        report.admissibility.beta_margin,
        report.admissibility.delta_ok
    );

    if let Some(out) = &args.out {
        #[derive(Serialize)]
        struct CheckReport<'a> {
            provenance: &'a CheckArgs,
            params: &'a AdsParams,
            report: &'a ArbReport,
        }
        let json = serde_json::to_string_pretty(&CheckReport {
            provenance: args,
            params: &params,
            report: &report,
        })?;
        if let Some(parent) = out.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)?;
            }
        }
        write_atomic(out, json.as_bytes())?;
    }
    Ok(report)
}
