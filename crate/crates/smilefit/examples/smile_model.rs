//! Evaluate the closed-form smile and its moneyness-dependent Hurst exponent
//! across a strike range, together with the quantities the arbitrage checker
//! relies on: analytic derivatives, the admissible beta bound, and the
//! large-strike limits.
//!
//! ```bash
//! cargo run --example smile_model
//! ```

use smilefit::ads::{
    beta_admissible_bound, hurst, hurst_derivative, sigma, sigma_derivative, sigma_limits,
};
use smilefit::AdsParams;

fn main() -> smilefit::Result<()> {
    let params = AdsParams::new(0.5, 0.3, 0.4, 0.08, 97.5, 100.0)?;
    println!(
        "smile parameters: alpha={} beta={} delta={} epsilon={} (m_min = {:.4})\n",
        params.alpha,
        params.beta,
        params.delta,
        params.epsilon,
        params.m_min()
    );

    println!(
        "{:>6} {:>9} {:>9} {:>11} {:>11} {:>10}",
        "m", "sigma", "H", "dsigma/dm", "dH/dm", "|beta|max"
    );
    for i in 0..13 {
        let m = 0.7 + 0.05 * i as f64;
        let line = |m: f64| -> smilefit::Result<String> {
            Ok(format!(
                "{:>6.2} {:>9.4} {:>9.4} {:>11.4} {:>11.4} {:>10.3}",
                m,
                sigma(m, &params),
                hurst(m, &params),
                sigma_derivative(m, &params)?,
                hurst_derivative(m, &params)?,
                beta_admissible_bound(m, &params)?
            ))
        };
        match line(m) {
            Ok(text) => println!("{text}"),
            // The derivative is singular exactly at the smile minimum.
            Err(_) => println!(
                "{m:>6.2} {:>9.4} {:>9.4} {:>11} {:>11}",
                sigma(m, &params),
                hurst(m, &params),
                "-",
                "-"
            ),
        }
    }

    println!("\nat the money: H(1) = {}", hurst(1.0, &params));
    println!(
        "at the minimum: sigma(m_min) = {} (the floor epsilon)",
        sigma(params.m_min(), &params)
    );
    let (h_inf, sigma_inf) = sigma_limits(&params);
    println!("large-strike limits: H -> {h_inf:.6}, sigma -> {sigma_inf:.6}");
    Ok(())
}
