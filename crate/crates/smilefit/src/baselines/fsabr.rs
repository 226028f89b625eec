//! Monte-Carlo pricing under the lognormal fractional SABR dynamics
//!
//! ```text
//! dS_t/S_t = α_t·(ρ dW₁ + √(1−ρ²) dW₂),    α_t = α₀·e^(ν·B_t^H),
//! ```
//!
//! with the fBm `B^H` driven by `W₁`. The pair `(ΔW₁ grid increments, B^H
//! grid values)` is jointly Gaussian; its cross-covariance follows from the
//! moving-average representation of `B^H` against the same white noise,
//!
//! ```text
//! Cov(B_t, W(b) − W(a)) = c_H/(H+½) · [ (t−a)^(H+½) − (t−min(b,t))^(H+½) ],
//! c_H = √(Γ(2H+1)·sin(πH)) / Γ(H+½),                      for 0 ≤ a < t,
//! ```
//!
//! so one Cholesky factor of the joint covariance reproduces the correlation
//! structure exactly at the grid points. Asset paths use a log-Euler step
//! (exact lognormal conditional on the volatility path per step), which keeps
//! `S` positive by construction.
//!
//! Paths are generated in fixed-size blocks, each block on its own
//! counter-based stream, and reduced in block order: outputs are
//! byte-identical for a given seed regardless of the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fbm::{cholesky_lower, fbm_covariance, lower_tri_matvec};
use super::sabr::SabrParams;
use crate::error::{Result, SmileError};
use crate::pricing::{self, PricingContext};
use crate::rng;

/// Paths simulated per RNG block.
const BLOCK_PATHS: usize = 4096;

/// Cap on the number of time steps (keeps the joint factorization dense-friendly).
pub const MAX_STEPS: usize = 512;

/// Monte-Carlo configuration shared by the CLI and the calibration objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    /// Number of simulated paths.
    pub n_paths: usize,
    /// Number of log-Euler time steps.
    pub n_steps: usize,
    /// Base seed; all block streams derive from it.
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            n_paths: 10_000,
            n_steps: 64,
            seed: 42,
        }
    }
}

/// Fractional SABR parameters: a SABR backbone plus the Hurst exponent of
/// the volatility driver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FsabrParams {
    /// Lognormal SABR backbone.
    pub sabr: SabrParams,
    /// Hurst exponent of the volatility fBm, in `(0, 1)`.
    pub hurst: f64,
}

impl FsabrParams {
    /// Validated constructor.
    pub fn new(sabr: SabrParams, hurst: f64) -> Result<Self> {
        let p = Self { sabr, hurst };
        p.validate()?;
        Ok(p)
    }

    /// Check the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        self.sabr.validate()?;
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(SmileError::invalid(format!(
                "hurst must lie in (0, 1), got {}",
                self.hurst
            )));
        }
        Ok(())
    }
}

/// One strike of a Monte-Carlo smile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmileSample {
    /// Strike.
    pub strike: f64,
    /// Discounted Monte-Carlo price.
    pub price: f64,
    /// Standard error of the price estimate.
    pub stderr: f64,
    /// Implied volatility, absent when the price falls outside the
    /// no-arbitrage inversion band.
    pub implied_vol: Option<f64>,
}

/// Cholesky factor of the joint `(ΔW₁, B^H)` covariance for a step grid.
fn joint_factor(tau: f64, n_steps: usize, hurst: f64) -> Result<Vec<f64>> {
    let n = n_steps;
    let dim = 2 * n;
    let dt = tau / n as f64;
    let times: Vec<f64> = (1..=n).map(|i| i as f64 * dt).collect();

    let c_h = (libm::tgamma(2.0 * hurst + 1.0) * (std::f64::consts::PI * hurst).sin()).sqrt()
        / libm::tgamma(hurst + 0.5);
    let hp = hurst + 0.5;

    let mut cov = vec![0.0; dim * dim];
    // Increment block: independent Brownian steps.
    for i in 0..n {
        cov[i * dim + i] = dt;
    }
    // fBm block: exact covariance (unit scale).
    for i in 0..n {
        for j in 0..n {
            cov[(n + i) * dim + (n + j)] = fbm_covariance(times[i], times[j], hurst, 1.0);
        }
    }
    // Cross block: moving-average kernel integrated over each increment.
    for i in 0..n {
        let a = i as f64 * dt;
        let b = (i + 1) as f64 * dt;
        for j in 0..n {
            let t = times[j];
            let c = if a >= t {
                0.0
            } else {
                c_h / hp * ((t - a).powf(hp) - (t - b.min(t)).powf(hp))
            };
            cov[i * dim + (n + j)] = c;
            cov[(n + j) * dim + i] = c;
        }
    }
    cholesky_lower(&cov, dim)
}

/// Simulate terminal asset prices, deterministically from the config seed.
///
/// The returned vector is ordered by path index, independent of the number
/// of worker threads.
pub fn simulate_terminals(
    ctx: &PricingContext,
    params: &FsabrParams,
    cfg: &McConfig,
) -> Result<Vec<f64>> {
    params.validate()?;
    let tau = ctx.tau();
    if !(tau > 0.0) {
        return Err(SmileError::invalid("simulation requires positive tau"));
    }
    if cfg.n_paths < 2 {
        return Err(SmileError::invalid("need at least 2 paths"));
    }
    if cfg.n_steps == 0 || cfg.n_steps > MAX_STEPS {
        return Err(SmileError::invalid(format!(
            "n_steps must lie in 1..={MAX_STEPS}, got {}",
            cfg.n_steps
        )));
    }

    let n = cfg.n_steps;
    let dim = 2 * n;
    let factor = joint_factor(tau, n, params.hurst)?;
    let dt = tau / n as f64;
    let sqrt_dt = dt.sqrt();
    let alpha0 = params.sabr.alpha0;
    let rho = params.sabr.rho;
    let rho_perp = (1.0 - rho * rho).sqrt();
    let nu = params.sabr.nu;
    let drift_rate = ctx.rate;
    let ln_s0 = ctx.spot.ln();

    let n_blocks = cfg.n_paths.div_ceil(BLOCK_PATHS);
    let blocks: Vec<Result<Vec<f64>>> = (0..n_blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = rng::block_rng(cfg.seed, block as u64);
            let paths_here = BLOCK_PATHS.min(cfg.n_paths - block * BLOCK_PATHS);
            let mut out = Vec::with_capacity(paths_here);
            let mut z = vec![0.0; dim];
            let mut x = vec![0.0; dim];
            for path in 0..paths_here {
                for zi in z.iter_mut() {
                    *zi = rng::standard_normal(&mut rng);
                }
                lower_tri_matvec(&factor, dim, &z, &mut x);
                let (dw1, bh) = x.split_at(n);

                let mut ln_s = ln_s0;
                for i in 0..n {
                    let b_left = if i == 0 { 0.0 } else { bh[i - 1] };
                    let alpha = alpha0 * (nu * b_left).exp();
                    if !alpha.is_finite() {
                        return Err(SmileError::Numerical {
                            message: format!(
                                "volatility overflow in block {block}, path {path}, step {i}: \
                                 nu*B = {:.3e}",
                                nu * b_left
                            ),
                        });
                    }
                    let dw2 = sqrt_dt * rng::standard_normal(&mut rng);
                    ln_s += (drift_rate - 0.5 * alpha * alpha) * dt
                        + alpha * (rho * dw1[i] + rho_perp * dw2);
                }
                let terminal = ln_s.exp();
                if !terminal.is_finite() {
                    return Err(SmileError::Numerical {
                        message: format!("non-finite terminal price in block {block}, path {path}"),
                    });
                }
                out.push(terminal);
            }
            Ok(out)
        })
        .collect();

    let mut terminals = Vec::with_capacity(cfg.n_paths);
    for block in blocks {
        terminals.extend(block?);
    }
    Ok(terminals)
}

fn price_from_terminals(terminals: &[f64], strike: f64, discount: f64) -> (f64, f64) {
    let n = terminals.len() as f64;
    let mut sum = 0.0;
    for &s in terminals {
        sum += (s - strike).max(0.0);
    }
    let mean = sum / n;
    let mut sum_sq = 0.0;
    for &s in terminals {
        let d = (s - strike).max(0.0) - mean;
        sum_sq += d * d;
    }
    let std = (sum_sq / (n - 1.0)).sqrt();
    (discount * mean, discount * std / n.sqrt())
}

/// Monte-Carlo price and standard error of a European call.
pub fn fsabr_price(
    ctx: &PricingContext,
    strike: f64,
    params: &FsabrParams,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    if !(strike > 0.0) || !strike.is_finite() {
        return Err(SmileError::invalid(format!(
            "strike must be positive, got {strike}"
        )));
    }
    let cfg = McConfig {
        n_paths,
        n_steps,
        seed,
    };
    let terminals = simulate_terminals(ctx, params, &cfg)?;
    let discount = (-ctx.rate * ctx.tau()).exp();
    Ok(price_from_terminals(&terminals, strike, discount))
}

/// Monte-Carlo smile over a strike list with per-strike price, standard
/// error, and implied volatility. All strikes share one simulated terminal
/// sample, which is what a per-strike [`fsabr_price`] at the same seed
/// produces as well.
pub fn fsabr_smile_detailed(
    ctx: &PricingContext,
    strikes: &[f64],
    params: &FsabrParams,
    cfg: &McConfig,
) -> Result<Vec<SmileSample>> {
    if strikes.is_empty() {
        return Err(SmileError::invalid("strike list must not be empty"));
    }
    let terminals = simulate_terminals(ctx, params, cfg)?;
    let discount = (-ctx.rate * ctx.tau()).exp();
    let mut out = Vec::with_capacity(strikes.len());
    for &k in strikes {
        if !(k > 0.0) || !k.is_finite() {
            return Err(SmileError::invalid(format!(
                "strike must be positive, got {k}"
            )));
        }
        let (price, stderr) = price_from_terminals(&terminals, k, discount);
        let implied_vol = match pricing::implied_vol(ctx, k, price) {
            Ok(iv) => Some(iv),
            Err(SmileError::OutOfBand { .. }) => {
                log::debug!("strike {k}: MC price {price:.6e} outside inversion band, dropped");
                None
            }
            Err(e) => return Err(e),
        };
        out.push(SmileSample {
            strike: k,
            price,
            stderr,
            implied_vol,
        });
    }
    Ok(out)
}

/// Monte-Carlo implied-volatility smile; strikes whose price cannot be
/// inverted are dropped. Errs when no strike survives.
pub fn fsabr_smile(
    ctx: &PricingContext,
    strikes: &[f64],
    params: &FsabrParams,
    cfg: &McConfig,
) -> Result<Vec<(f64, f64)>> {
    let detailed = fsabr_smile_detailed(ctx, strikes, params, cfg)?;
    let smile: Vec<(f64, f64)> = detailed
        .iter()
        .filter_map(|s| s.implied_vol.map(|iv| (s.strike, iv)))
        .collect();
    if smile.is_empty() {
        return Err(SmileError::Numerical {
            message: "every strike fell outside the inversion band".into(),
        });
    }
    Ok(smile)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pricing::call_price;

    fn ctx() -> PricingContext {
        PricingContext::with_tau(100.0, 0.02, 30.0 / 365.0).unwrap()
    }

    fn params(alpha0: f64, rho: f64, nu: f64, hurst: f64) -> FsabrParams {
        FsabrParams::new(SabrParams::new(alpha0, rho, nu).unwrap(), hurst).unwrap()
    }

    #[test]
    fn zero_nu_degenerates_to_black_scholes() {
        let c = ctx();
        let p = params(0.2, -0.3, 0.0, 0.3);
        for &k in &[90.0, 100.0, 110.0] {
            let (price, se) = fsabr_price(&c, k, &p, 20_000, 32, 11).unwrap();
            let bs = call_price(&c, k, 0.2).unwrap();
            assert!(
                (price - bs).abs() < 3.0 * se,
                "K={k}: MC {price} +/- {se} vs BS {bs}"
            );
        }
    }

    #[test]
    fn log_euler_is_exact_for_constant_vol_single_step() {
        // nu = 0 with one step: the discretization is exactly lognormal, so
        // a large sample converges to the closed form.
        let c = PricingContext::with_tau(100.0, 0.0, 1.0).unwrap();
        let p = params(0.2, 0.0, 0.0, 0.5);
        let (price, se) = fsabr_price(&c, 100.0, &p, 60_000, 1, 3).unwrap();
        let bs = call_price(&c, 100.0, 0.2).unwrap();
        assert!((price - bs).abs() < 3.0 * se, "MC {price} +/- {se} vs {bs}");
    }

    #[test]
    fn fixed_seed_is_bit_reproducible() {
        let c = ctx();
        let p = params(0.25, -0.4, 0.6, 0.35);
        let a = fsabr_price(&c, 105.0, &p, 8_000, 16, 77).unwrap();
        let b = fsabr_price(&c, 105.0, &p, 8_000, 16, 77).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
        let d = fsabr_price(&c, 105.0, &p, 8_000, 16, 78).unwrap();
        assert_ne!(a.0.to_bits(), d.0.to_bits());
    }

    #[test]
    fn price_decreases_in_strike_and_respects_band() {
        let c = ctx();
        let p = params(0.25, -0.3, 0.5, 0.4);
        let cfg = McConfig {
            n_paths: 20_000,
            n_steps: 32,
            seed: 5,
        };
        let strikes: Vec<f64> = (0..12).map(|i| 80.0 + 4.0 * i as f64).collect();
        let smile = fsabr_smile_detailed(&c, &strikes, &p, &cfg).unwrap();
        let disc = (-0.02_f64 * c.tau()).exp();
        let mut prev = f64::INFINITY;
        for s in &smile {
            assert!(s.price <= prev + 1e-12, "price not non-increasing");
            let intrinsic = (100.0 - s.strike * disc).max(0.0);
            assert!(s.price >= intrinsic - 1e-12 && s.price <= 100.0);
            prev = s.price;
        }
    }

    #[test]
    fn deep_otm_short_tau_price_is_negligible() {
        let c = PricingContext::with_tau(100.0, 0.0, 0.02).unwrap();
        let p = params(0.2, 0.0, 0.3, 0.4);
        let (price, _) = fsabr_price(&c, 300.0, &p, 20_000, 16, 9).unwrap();
        assert!(price < 1e-4 * 100.0, "got {price}");
    }

    #[test]
    fn flat_smile_at_zero_nu() {
        let c = ctx();
        let p = params(0.2, 0.0, 0.0, 0.5);
        let cfg = McConfig {
            n_paths: 40_000,
            n_steps: 16,
            seed: 21,
        };
        let strikes = [92.0, 96.0, 100.0, 104.0, 108.0];
        let smile = fsabr_smile_detailed(&c, &strikes, &p, &cfg).unwrap();
        assert_eq!(smile.len(), 5);
        for s in smile {
            // Tolerance: 3 standard errors mapped into vol units by vega.
            let iv = s.implied_vol.unwrap();
            let tol = 3.0 * s.stderr / crate::pricing::vega(&c, s.strike, 0.2);
            assert!(
                (iv - 0.2).abs() < tol,
                "K={}: iv {iv} (tol {tol})",
                s.strike
            );
        }
    }

    #[test]
    fn atm_agreement_with_hagan_at_brownian_hurst() {
        // H = 1/2 with a small vol-of-vol: the Hagan asymptotics are accurate
        // to well under the Monte-Carlo band, so the two smiles must agree
        // near the money within 2 standard errors (mapped to vol by vega).
        let c = ctx();
        let sabr = SabrParams::new(0.2, -0.3, 0.3).unwrap();
        let p = FsabrParams::new(sabr, 0.5).unwrap();
        let cfg = McConfig {
            n_paths: 20_000,
            n_steps: 32,
            seed: 14,
        };
        let forward = 100.0 * (0.02_f64 * c.tau()).exp();
        let strikes = [forward * 0.98, forward, forward * 1.02];
        let smile = fsabr_smile_detailed(&c, &strikes, &p, &cfg).unwrap();
        for s in smile {
            let iv = s.implied_vol.unwrap();
            let hagan = crate::baselines::sabr_implied_vol(&c, s.strike, &sabr).unwrap();
            let se_vol = s.stderr / crate::pricing::vega(&c, s.strike, hagan);
            assert!(
                (iv - hagan).abs() < 2.0 * se_vol,
                "K={}: mc {iv} vs hagan {hagan} (2se {})",
                s.strike,
                2.0 * se_vol
            );
        }
    }

    #[test]
    fn smile_is_reproducible_for_fixed_seed() {
        let c = ctx();
        let p = params(0.22, -0.5, 0.8, 0.3);
        let cfg = McConfig {
            n_paths: 6_000,
            n_steps: 16,
            seed: 123,
        };
        let strikes = [90.0, 100.0, 110.0];
        let a = fsabr_smile(&c, &strikes, &p, &cfg).unwrap();
        let b = fsabr_smile(&c, &strikes, &p, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn per_strike_price_agrees_with_batch_smile() {
        let c = ctx();
        let p = params(0.22, -0.5, 0.8, 0.3);
        let cfg = McConfig {
            n_paths: 4_000,
            n_steps: 16,
            seed: 55,
        };
        let batch = fsabr_smile_detailed(&c, &[95.0, 105.0], &p, &cfg).unwrap();
        let (single, _) = fsabr_price(&c, 95.0, &p, 4_000, 16, 55).unwrap();
        assert_eq!(batch[0].price.to_bits(), single.to_bits());
    }

    #[test]
    fn brownian_joint_coupling_reproduces_w1_as_fbm() {
        // At H = 1/2 the fBm is the running sum of the W1 increments; the
        // joint factorization (with its semidefinite jitter) must reproduce
        // that near-exactly.
        let factor = joint_factor(1.0, 8, 0.5).unwrap();
        let dim = 16;
        let mut rng = rng::block_rng(2, 0);
        let mut z = vec![0.0; dim];
        let mut x = vec![0.0; dim];
        for _ in 0..50 {
            for zi in z.iter_mut() {
                *zi = rng::standard_normal(&mut rng);
            }
            lower_tri_matvec(&factor, dim, &z, &mut x);
            let mut cum = 0.0;
            for i in 0..8 {
                cum += x[i];
                assert!(
                    (x[8 + i] - cum).abs() < 1e-4,
                    "B[{i}] = {} vs cumsum {cum}",
                    x[8 + i]
                );
            }
        }
    }

    #[test]
    fn volatility_overflow_is_reported() {
        let c = PricingContext::with_tau(100.0, 0.0, 1.0).unwrap();
        let p = params(0.2, 0.0, 2500.0, 0.5);
        let err = fsabr_price(&c, 100.0, &p, 2_000, 8, 4);
        assert!(
            matches!(err, Err(SmileError::Numerical { .. })),
            "expected overflow diagnostics, got {err:?}"
        );
    }

    #[test]
    fn config_validation() {
        let c = ctx();
        let p = params(0.2, 0.0, 0.3, 0.4);
        assert!(fsabr_price(&c, 100.0, &p, 1, 16, 0).is_err());
        assert!(fsabr_price(&c, 100.0, &p, 100, 0, 0).is_err());
        assert!(fsabr_price(&c, 100.0, &p, 100, MAX_STEPS + 1, 0).is_err());
        assert!(fsabr_price(&c, -5.0, &p, 100, 16, 0).is_err());
        assert!(FsabrParams::new(SabrParams::new(0.2, 0.0, 0.3).unwrap(), 1.0).is_err());
    }
}
