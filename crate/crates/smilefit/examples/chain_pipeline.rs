//! End-to-end batch pipeline through the library API: write a small option
//! chain as CSV, calibrate every model per ticker, aggregate the metric
//! rows, and list the artifacts — the same path the `smilefit` binary takes.
//!
//! ```bash
//! cargo run --release --example chain_pipeline
//! ```

use std::fs;

use smilefit::ads;
use smilefit::calibration::ModelTag;
use smilefit::cli::{cmd_calibrate, cmd_report, RunConfig};
use smilefit::metrics::CurvatureMode;
use smilefit::{AdsParams, McConfig};

fn main() -> smilefit::Result<()> {
    let dir = tempfile::tempdir()?;
    let input = dir.path().join("chain.csv");
    let outdir = dir.path().join("out");

    // Two tickers whose smiles follow the closed-form model with different
    // wing steepness.
    let mut body =
        String::from("ticker,quote_date,expiry,strike,implied_vol,underlying_close,rate\n");
    for (ticker, alpha) in [("ACME", 0.45), ("GLOBEX", 0.7)] {
        let params = AdsParams::new(alpha, 0.25, 0.45, 0.11, 97.5, 100.0)?;
        for i in 0..13 {
            let strike = 79.5 + 3.0 * i as f64;
            let iv = ads::sigma(100.0 / strike, &params);
            body.push_str(&format!(
                "{ticker},2024-03-01,2024-03-31,{strike},{iv},100.0,0.03\n"
            ));
        }
    }
    fs::write(&input, body)?;

    let config = RunConfig {
        input,
        outdir: outdir.clone(),
        models: ModelTag::ALL.to_vec(),
        n_trials: 60,
        seed: 42,
        mc: McConfig {
            n_paths: 2_000,
            n_steps: 16,
            seed: 42,
        },
        curvature: CurvatureMode::Printed,
        svg: true,
    };

    let outcome = cmd_calibrate(&config)?;
    println!(
        "calibrated {:?} ({} failed)",
        outcome.succeeded,
        outcome.failed.len()
    );
    let n = cmd_report(&outdir, true)?;
    println!("report over {n} ticker(s)\n");

    for label in &outcome.succeeded {
        let text = fs::read_to_string(outdir.join(label).join("ads.fit.json"))?;
        let report: serde_json::Value = serde_json::from_str(&text)?;
        println!(
            "{label}: ads rmse = {}  arbitrage-free = {}",
            report["fit"]["rmse"], report["arbitrage"]["i_monotone"]["passed"]
        );
    }

    println!("\nartifacts:");
    let mut paths: Vec<_> = walk(&outdir);
    paths.sort();
    for p in paths {
        println!("  {p}");
    }
    Ok(())
}

fn walk(dir: &std::path::Path) -> Vec<String> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).into_iter().flatten().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else if let Ok(rel) = path.strip_prefix(dir) {
                out.push(rel.display().to_string());
            }
        }
    }
    out
}
