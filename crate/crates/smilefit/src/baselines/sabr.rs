//! Lognormal SABR implied-volatility baseline (Hagan asymptotic, β = 1).
//!
//! For the lognormal backbone the Hagan approximation reduces to
//!
//! ```text
//! σ(K) = α₀ · z/x(z) · (1 + [ρ·ν·α₀/4 + (2 − 3ρ²)·ν²/24]·τ)
//! z    = (ν/α₀)·ln(F/K)
//! x(z) = ln( (√(1 − 2ρz + z²) + z − ρ) / (1 − ρ) )
//! ```
//!
//! with forward `F = S·e^(rτ)`. Near the money `z/x(z)` is evaluated by its
//! Taylor expansion `1 − ρz/2 + (2 − 3ρ²)z²/12`, switched below
//! `|ln(F/K)| = 1e-6`, which also covers the `ν = 0` flat-smile limit.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SmileError};
use crate::pricing::PricingContext;

/// Log-moneyness threshold below which the ATM series expansion is used.
const ATM_SWITCH: f64 = 1e-6;

/// SABR parameters for the lognormal backbone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SabrParams {
    /// Initial volatility level, `> 0`.
    pub alpha0: f64,
    /// Spot-vol correlation, strictly inside `(-1, 1)`.
    pub rho: f64,
    /// Volatility of volatility, `>= 0`.
    pub nu: f64,
}

impl SabrParams {
    /// Validated constructor.
    pub fn new(alpha0: f64, rho: f64, nu: f64) -> Result<Self> {
        let p = Self { alpha0, rho, nu };
        p.validate()?;
        Ok(p)
    }

    /// Check the parameter invariants.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0) || !self.alpha0.is_finite() {
            return Err(SmileError::invalid(format!(
                "alpha0 must be positive, got {}",
                self.alpha0
            )));
        }
        if !self.rho.is_finite() || self.rho.abs() >= 1.0 {
            return Err(SmileError::invalid(format!(
                "rho must lie strictly in (-1, 1), got {}",
                self.rho
            )));
        }
        if self.nu < 0.0 || !self.nu.is_finite() {
            return Err(SmileError::invalid(format!(
                "nu must be non-negative, got {}",
                self.nu
            )));
        }
        Ok(())
    }
}

/// Hagan lognormal implied volatility at a strike.
pub fn sabr_implied_vol(ctx: &PricingContext, strike: f64, params: &SabrParams) -> Result<f64> {
    if !(strike > 0.0) || !strike.is_finite() {
        return Err(SmileError::invalid(format!(
            "strike must be positive, got {strike}"
        )));
    }
    let tau = ctx.tau();
    if !(tau > 0.0) {
        return Err(SmileError::invalid("sabr vol requires positive tau"));
    }
    let forward = ctx.spot * (ctx.rate * tau).exp();
    let ln_fk = (forward / strike).ln();
    let alpha = params.alpha0;
    let rho = params.rho;
    let nu = params.nu;

    let z = (nu / alpha) * ln_fk;
    let z_ratio = if ln_fk.abs() < ATM_SWITCH {
        1.0 - 0.5 * rho * z + (2.0 - 3.0 * rho * rho) / 12.0 * z * z
    } else if nu == 0.0 {
        1.0
    } else {
        let disc = (1.0 - 2.0 * rho * z + z * z).sqrt();
        z / ((disc + z - rho) / (1.0 - rho)).ln()
    };

    let correction =
        1.0 + (0.25 * rho * nu * alpha + (2.0 - 3.0 * rho * rho) / 24.0 * nu * nu) * tau;
    Ok(alpha * z_ratio * correction)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PricingContext {
        PricingContext::with_tau(100.0, 0.02, 30.0 / 365.0).unwrap()
    }

    #[test]
    fn zero_nu_gives_flat_smile_at_alpha0() {
        let p = SabrParams::new(0.22, -0.3, 0.0).unwrap();
        let c = ctx();
        for &k in &[60.0, 80.0, 100.0, 125.0, 160.0] {
            let v = sabr_implied_vol(&c, k, &p).unwrap();
            assert!((v - 0.22).abs() < 1e-15, "K={k}: {v}");
        }
    }

    #[test]
    fn atm_branch_is_the_limit_of_the_general_formula() {
        let p = SabrParams::new(0.2, -0.3, 0.4).unwrap();
        let c = ctx();
        let forward = 100.0 * (0.02_f64 * c.tau()).exp();
        let atm = sabr_implied_vol(&c, forward, &p).unwrap();
        // Closed ATM value: z = 0, ratio = 1.
        let expect =
            0.2 * (1.0 + (0.25 * (-0.3) * 0.4 * 0.2 + (2.0 - 3.0 * 0.09) / 24.0 * 0.16) * c.tau());
        assert!((atm - expect).abs() < 1e-15);
        // General formula evaluated just off the money agrees to first order.
        for &bump in &[1e-8, -1e-8] {
            let v = sabr_implied_vol(&c, forward * (1.0 + bump), &p).unwrap();
            assert!((v - atm).abs() < 1e-8, "bump {bump}: {v} vs {atm}");
        }
    }

    #[test]
    fn skew_sign_follows_rho_and_smile_is_convex() {
        let c = PricingContext::with_tau(100.0, 0.0, 0.25).unwrap();
        let p = SabrParams::new(0.2, -0.3, 0.4).unwrap();
        let strikes: Vec<f64> = (0..41).map(|i| 70.0 + 1.5 * i as f64).collect();
        let vols: Vec<f64> = strikes
            .iter()
            .map(|&k| sabr_implied_vol(&c, k, &p).unwrap())
            .collect();
        // Negative rho: the low-strike wing sits above the high-strike wing.
        assert!(vols[0] > vols[40], "skew direction wrong for rho < 0");
        // Convexity of the smile in strike.
        for w in vols.windows(3).zip(strikes.windows(3)) {
            let (v, k) = w;
            let h = k[1] - k[0];
            let second = (v[2] - 2.0 * v[1] + v[0]) / (h * h);
            assert!(second > -1e-6, "concave segment at K = {}", k[1]);
        }
        // Positive rho flips the wing ordering.
        let p_pos = SabrParams::new(0.2, 0.3, 0.4).unwrap();
        let lo = sabr_implied_vol(&c, 70.0, &p_pos).unwrap();
        let hi = sabr_implied_vol(&c, 130.0, &p_pos).unwrap();
        assert!(hi > lo, "skew direction wrong for rho > 0");
    }

    #[test]
    fn parameter_validation() {
        assert!(SabrParams::new(0.0, 0.0, 0.1).is_err());
        assert!(SabrParams::new(0.2, 1.0, 0.1).is_err());
        assert!(SabrParams::new(0.2, -1.0, 0.1).is_err());
        assert!(SabrParams::new(0.2, 0.0, -0.1).is_err());
        assert!(SabrParams::new(0.2, 0.0, 0.0).is_ok());
    }

    #[test]
    fn rejects_bad_strike_or_tau() {
        let p = SabrParams::new(0.2, 0.0, 0.3).unwrap();
        assert!(sabr_implied_vol(&ctx(), 0.0, &p).is_err());
        let expired = PricingContext::new(100.0, 0.0, 1.0, 1.0).unwrap();
        assert!(sabr_implied_vol(&expired, 100.0, &p).is_err());
    }
}
