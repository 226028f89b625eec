//! Black-Scholes call pricing, implied-volatility inversion, and the strike /
//! maturity derivatives consumed by the arbitrage checker.
//!
//! Prices follow the standard lognormal formula
//!
//! ```text
//! C = S·N(d₁) − K·e^(−rτ)·N(d₂),   d₁ = [ln(S/K) + (r + σ²/2)τ] / (σ√τ),
//!                                  d₂ = d₁ − σ√τ,
//! ```
//!
//! with the normal CDF evaluated through the complementary error function, so
//! derivative cross-checks are not limited by CDF approximation error.
//!
//! The strike derivatives are *total* derivatives along a strike-dependent
//! volatility `σ(K)` supplied by the smile model: the chain-rule term enters
//! through [`crate::ads::sigma_derivative`], and the lognormal identity
//! `S·φ(d₁) = K·e^(−rτ)·φ(d₂)` cancels the remaining `∂d₁/∂K` terms.

use crate::ads::{self, AdsParams};
use crate::error::{Result, SmileError};

/// Absolute pricing tolerance targeted by [`implied_vol`].
pub const IV_PRICE_TOL: f64 = 1e-10;

/// Iteration budget for the implied-volatility solver (bisection + Newton).
pub const IV_MAX_ITER: usize = 200;

/// Standard normal cumulative distribution function.
///
/// Evaluated as `erfc(−x/√2)/2`; accurate to ~1 ulp over the full range,
/// which the finite-difference derivative checks rely on.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal probability density function.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Market frame shared by pricing and arbitrage checks: spot, continuously
/// compounded rate, valuation time `t` and expiry time `T` (both in years).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PricingContext {
    /// Spot price of the underlying.
    pub spot: f64,
    /// Continuously compounded risk-free rate (1/year).
    pub rate: f64,
    /// Valuation time in years.
    pub now: f64,
    /// Expiry time in years; must satisfy `expiry >= now`.
    pub expiry: f64,
}

impl PricingContext {
    /// Build a context, validating `spot > 0` and `expiry >= now`.
    pub fn new(spot: f64, rate: f64, now: f64, expiry: f64) -> Result<Self> {
        if !(spot > 0.0) || !spot.is_finite() {
            return Err(SmileError::invalid(format!(
                "spot must be positive and finite, got {spot}"
            )));
        }
        if !rate.is_finite() || !now.is_finite() || !expiry.is_finite() {
            return Err(SmileError::invalid("rate and times must be finite"));
        }
        if expiry < now {
            return Err(SmileError::invalid(format!(
                "expiry {expiry} precedes valuation time {now}"
            )));
        }
        Ok(Self {
            spot,
            rate,
            now,
            expiry,
        })
    }

    /// Convenience constructor with valuation time 0 and expiry `tau`.
    pub fn with_tau(spot: f64, rate: f64, tau: f64) -> Result<Self> {
        Self::new(spot, rate, 0.0, tau)
    }

    /// Time to expiry `T − t` in years.
    pub fn tau(&self) -> f64 {
        self.expiry - self.now
    }
}

fn d1_d2(spot: f64, strike: f64, rate: f64, tau: f64, sigma: f64) -> (f64, f64) {
    let sqrt_tau = tau.sqrt();
    let d1 = ((spot / strike).ln() + (rate + 0.5 * sigma * sigma) * tau) / (sigma * sqrt_tau);
    (d1, d1 - sigma * sqrt_tau)
}

/// European call price.
///
/// At `tau = 0` returns the payoff `(S − K)⁺`. At `sigma = 0` with `tau > 0`
/// returns the discounted-intrinsic limit `(S − K·e^(−rτ))⁺`, consistent with
/// `N(±∞)` in the closed formula.
pub fn call_price(ctx: &PricingContext, strike: f64, sigma: f64) -> Result<f64> {
    if !(strike > 0.0) || !strike.is_finite() {
        return Err(SmileError::invalid(format!(
            "strike must be positive and finite, got {strike}"
        )));
    }
    if sigma < 0.0 || !sigma.is_finite() {
        return Err(SmileError::invalid(format!(
            "sigma must be non-negative and finite, got {sigma}"
        )));
    }
    let tau = ctx.tau();
    if tau == 0.0 {
        return Ok((ctx.spot - strike).max(0.0));
    }
    if sigma == 0.0 {
        return Ok((ctx.spot - strike * (-ctx.rate * tau).exp()).max(0.0));
    }
    let (d1, d2) = d1_d2(ctx.spot, strike, ctx.rate, tau, sigma);
    Ok(ctx.spot * norm_cdf(d1) - strike * (-ctx.rate * tau).exp() * norm_cdf(d2))
}

/// Black-Scholes vega, `∂C/∂σ = S·φ(d₁)·√τ`.
pub fn vega(ctx: &PricingContext, strike: f64, sigma: f64) -> f64 {
    let tau = ctx.tau();
    if tau <= 0.0 || sigma <= 0.0 {
        return 0.0;
    }
    let (d1, _) = d1_d2(ctx.spot, strike, ctx.rate, tau, sigma);
    ctx.spot * norm_pdf(d1) * tau.sqrt()
}

/// Invert the call price to an implied volatility.
///
/// The price must lie strictly inside the static band
/// `((S − K·e^(−rτ))⁺, S)`. The solver brackets by bisection down to a
/// σ-interval of 1e-4 and then polishes with Newton steps (vega floored at
/// 1e-12) until the repriced error is below [`IV_PRICE_TOL`].
pub fn implied_vol(ctx: &PricingContext, strike: f64, price: f64) -> Result<f64> {
    if !(strike > 0.0) || !strike.is_finite() {
        return Err(SmileError::invalid(format!(
            "strike must be positive and finite, got {strike}"
        )));
    }
    let tau = ctx.tau();
    if tau <= 0.0 {
        return Err(SmileError::invalid(
            "implied vol undefined at zero time to expiry",
        ));
    }
    let lower = (ctx.spot - strike * (-ctx.rate * tau).exp()).max(0.0);
    let upper = ctx.spot;
    if !(price > lower && price < upper) {
        return Err(SmileError::OutOfBand {
            price,
            lower,
            upper,
        });
    }

    let mut iters = 0usize;

    // Bracket: price is strictly increasing in sigma from the discounted
    // intrinsic (sigma -> 0) to the spot (sigma -> inf).
    let mut lo = 0.0_f64;
    let mut hi = 0.5_f64;
    while call_price(ctx, strike, hi)? < price {
        hi *= 2.0;
        iters += 1;
        if hi > 1e6 || iters > IV_MAX_ITER {
            return Err(SmileError::Convergence {
                message: format!("implied vol bracket failed at sigma = {hi}"),
            });
        }
    }

    // Bisection down to a 1e-4 wide sigma interval.
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if call_price(ctx, strike, mid)? < price {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
        if iters > IV_MAX_ITER {
            return Err(SmileError::Convergence {
                message: "implied vol bisection exceeded iteration budget".into(),
            });
        }
    }

    // Safeguarded Newton polish on log-price: well conditioned for tiny
    // deep-out-of-the-money prices, with the bisection bracket maintained as
    // a fallback whenever a step would leave it. Log-vega is computed
    // analytically so the step survives vega underflow.
    let sqrt_tau = tau.sqrt();
    let ln_vega = |sigma: f64| {
        let (d1, _) = d1_d2(ctx.spot, strike, ctx.rate, tau, sigma);
        (ctx.spot * sqrt_tau).ln() - 0.5 * d1 * d1 - 0.5 * (2.0 * std::f64::consts::PI).ln()
    };
    // Iterate to a sigma fixpoint rather than stopping at the price
    // tolerance: for low-vega strikes the tolerance is reached while sigma
    // is still several digits short.
    let tol = IV_PRICE_TOL.max(1e-12 * price);
    let mut sigma = 0.5 * (lo + hi);
    for _ in 0..20 {
        let p = call_price(ctx, strike, sigma)?;
        if p == price {
            return Ok(sigma);
        }
        if p > price {
            hi = sigma;
        } else {
            lo = sigma;
        }
        let newton = if p > 0.0 {
            sigma - (p / price).ln() * (p.ln() - ln_vega(sigma)).exp()
        } else {
            f64::NAN // underflowed price: fall back to bisection
        };
        let next = if newton.is_finite() && newton >= lo && newton <= hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == sigma {
            break; // no progress possible at float resolution
        }
        sigma = next;
    }
    let diff = call_price(ctx, strike, sigma)? - price;
    if diff.abs() <= tol {
        return Ok(sigma);
    }
    Err(SmileError::Convergence {
        message: format!("implied vol residual {diff:.3e} after Newton polish"),
    })
}

/// Total strike derivative `dC/dK` along the smile `σ(K)` of an implied
/// volatility model, including the chain-rule term through
/// [`crate::ads::sigma_derivative`]:
///
/// ```text
/// dC/dK = −e^(−rτ)·N(d₂) + K·√τ·e^(−rτ)·φ(d₂)·dσ/dK
/// ```
pub fn dc_dk(ctx: &PricingContext, strike: f64, params: &AdsParams) -> Result<f64> {
    if !(strike > 0.0) {
        return Err(SmileError::invalid("strike must be positive"));
    }
    let tau = ctx.tau();
    if tau <= 0.0 {
        return Err(SmileError::invalid(
            "dC/dK requires positive time to expiry",
        ));
    }
    let m = ctx.spot / strike;
    let sigma = ads::sigma(m, params);
    let dsigma_dm = ads::sigma_derivative(m, params)?;
    let dsigma_dk = -dsigma_dm * ctx.spot / (strike * strike);
    let disc = (-ctx.rate * tau).exp();
    let (_, d2) = d1_d2(ctx.spot, strike, ctx.rate, tau, sigma);
    Ok(-disc * norm_cdf(d2) + strike * tau.sqrt() * disc * norm_pdf(d2) * dsigma_dk)
}

/// Second total strike derivative `d²C/dK²`, computed as one central finite
/// difference of the analytic [`dc_dk`] with step `h = K·1e-5`.
pub fn d2c_dk2(ctx: &PricingContext, strike: f64, params: &AdsParams) -> Result<f64> {
    let h = strike * 1e-5;
    let up = dc_dk(ctx, strike + h, params)?;
    let down = dc_dk(ctx, strike - h, params)?;
    Ok((up - down) / (2.0 * h))
}

/// Maturity derivative at fixed strike-level volatility:
///
/// ```text
/// ∂C/∂T = r·K·e^(−rτ)·N(d₂) + σ·K·e^(−rτ)·φ(d₂) / (2√τ)
/// ```
///
/// Both terms are non-negative for `r ≥ 0`, which is what the calendar
/// condition verifies numerically.
pub fn dc_dt(ctx: &PricingContext, strike: f64, sigma: f64) -> Result<f64> {
    if !(strike > 0.0) {
        return Err(SmileError::invalid("strike must be positive"));
    }
    if !(sigma > 0.0) {
        return Err(SmileError::invalid("dC/dT requires positive sigma"));
    }
    let tau = ctx.tau();
    if tau <= 0.0 {
        return Err(SmileError::invalid(
            "dC/dT requires positive time to expiry",
        ));
    }
    let disc = (-ctx.rate * tau).exp();
    let (_, d2) = d1_d2(ctx.spot, strike, ctx.rate, tau, sigma);
    Ok(ctx.rate * strike * disc * norm_cdf(d2)
        + sigma * strike * disc * norm_pdf(d2) / (2.0 * tau.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ads::AdsParams;

    fn ctx(spot: f64, rate: f64, tau: f64) -> PricingContext {
        PricingContext::with_tau(spot, rate, tau).unwrap()
    }

    /// Independent oracle: risk-neutral expectation of the discounted payoff
    /// by composite Simpson quadrature over the terminal log-price.
    fn call_price_quadrature(s: f64, k: f64, r: f64, tau: f64, sigma: f64) -> f64 {
        let drift = (r - 0.5 * sigma * sigma) * tau;
        let vol = sigma * tau.sqrt();
        // Payoff is nonzero for z above the strike threshold.
        let z_lo = ((k / s).ln() - drift) / vol;
        let z_hi = z_lo.max(0.0) + 12.0;
        let n = 200_000; // even
        let h = (z_hi - z_lo) / n as f64;
        let integrand = |z: f64| {
            let st = s * (drift + vol * z).exp();
            (st - k).max(0.0) * norm_pdf(z)
        };
        let mut acc = integrand(z_lo) + integrand(z_hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * integrand(z_lo + i as f64 * h);
        }
        (-r * tau).exp() * acc * h / 3.0
    }

    #[test]
    fn norm_cdf_reference_values() {
        assert!((norm_cdf(0.0) - 0.5).abs() < 1e-16);
        // N(1) and N(-1), 16 significant digits
        assert!((norm_cdf(1.0) - 0.841344746068543).abs() < 1e-15);
        assert!((norm_cdf(-1.0) - 0.158655253931457).abs() < 1e-15);
        assert!((norm_cdf(8.0) - 1.0).abs() < 1e-15);
        assert!(norm_cdf(-40.0) >= 0.0);
    }

    // --- call_price ---

    #[test]
    fn price_at_expiry_is_payoff() {
        let c = PricingContext::new(100.0, 0.03, 1.0, 1.0).unwrap();
        assert_eq!(call_price(&c, 90.0, 0.2).unwrap(), 10.0);
        assert_eq!(call_price(&c, 110.0, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn price_tiny_strike_tends_to_spot() {
        let c = ctx(100.0, 0.0, 1.0);
        let p = call_price(&c, 1e-9, 0.2).unwrap();
        assert!((p - 100.0).abs() < 1e-6, "got {p}");
    }

    #[test]
    fn price_atm_matches_quadrature_oracle() {
        let c = ctx(100.0, 0.0, 1.0);
        let p = call_price(&c, 100.0, 0.2).unwrap();
        let oracle = call_price_quadrature(100.0, 100.0, 0.0, 1.0, 0.2);
        assert!(
            (p - oracle).abs() < 1e-8,
            "price {p} vs quadrature {oracle}"
        );
        // Frozen from the oracle.
        assert!((p - 7.965567455405796).abs() < 1e-12);
    }

    #[test]
    fn price_matches_quadrature_across_strikes() {
        let c = ctx(250.0, 0.04, 0.5);
        for &k in &[150.0, 220.0, 250.0, 280.0, 400.0] {
            let p = call_price(&c, k, 0.35).unwrap();
            let oracle = call_price_quadrature(250.0, k, 0.04, 0.5, 0.35);
            assert!(
                (p - oracle).abs() < 1e-7,
                "K={k}: price {p} vs quadrature {oracle}"
            );
        }
    }

    #[test]
    fn price_zero_sigma_is_discounted_intrinsic() {
        let c = ctx(100.0, 0.05, 2.0);
        let expect = 100.0 - 90.0 * (-0.1_f64).exp();
        assert!((call_price(&c, 90.0, 0.0).unwrap() - expect).abs() < 1e-14);
        assert_eq!(call_price(&c, 200.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn price_rejects_negative_sigma() {
        let c = ctx(100.0, 0.0, 1.0);
        assert!(call_price(&c, 100.0, -0.1).is_err());
    }

    #[test]
    fn context_rejects_expiry_before_now() {
        assert!(PricingContext::new(100.0, 0.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn price_stays_in_static_band() {
        let c = ctx(120.0, 0.02, 0.7);
        let disc = (-0.02_f64 * 0.7).exp();
        for i in 0..60 {
            let k = 20.0 + 10.0 * i as f64;
            for &sig in &[0.05, 0.2, 0.8, 2.5] {
                let p = call_price(&c, k, sig).unwrap();
                let intrinsic = (120.0 - k * disc).max(0.0);
                assert!(p >= intrinsic - 1e-12, "K={k} sig={sig}: {p} < {intrinsic}");
                assert!(p <= 120.0 + 1e-12);
            }
        }
    }

    #[test]
    fn price_monotone_in_strike_and_sigma() {
        let c = ctx(100.0, 0.01, 0.25);
        let mut prev = f64::INFINITY;
        for i in 0..80 {
            let k = 40.0 + 2.0 * i as f64;
            let p = call_price(&c, k, 0.3).unwrap();
            assert!(p <= prev + 1e-12, "price increased at K={k}");
            prev = p;
        }
        let mut prev = 0.0;
        for i in 1..50 {
            let sig = 0.02 * i as f64;
            let p = call_price(&c, 105.0, sig).unwrap();
            assert!(p >= prev - 1e-12, "price decreased at sigma={sig}");
            prev = p;
        }
    }

    #[test]
    fn price_vanishes_at_extreme_strike() {
        let c = ctx(100.0, 0.03, 0.5);
        let p = call_price(&c, 1e6 * 100.0, 0.4).unwrap();
        assert!(p.abs() < 1e-8 * 100.0, "got {p}");
    }

    // --- implied_vol ---

    #[test]
    fn implied_vol_round_trip() {
        let c = ctx(100.0, 0.02, 0.5);
        let p = call_price(&c, 110.0, 0.2).unwrap();
        let iv = implied_vol(&c, 110.0, p).unwrap();
        assert!((iv - 0.2).abs() < 1e-8, "got {iv}");
    }

    #[test]
    fn implied_vol_boundary_price_rejected() {
        let c = ctx(100.0, 0.03, 1.0);
        let intrinsic = 100.0 - 80.0 * (-0.03_f64).exp();
        assert!(matches!(
            implied_vol(&c, 80.0, intrinsic),
            Err(SmileError::OutOfBand { .. })
        ));
        assert!(matches!(
            implied_vol(&c, 80.0, 100.0),
            Err(SmileError::OutOfBand { .. })
        ));
    }

    #[test]
    fn implied_vol_random_round_trips() {
        // 100 seeded (ctx, K, sigma) triples; forward pricer as oracle.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let mut worst = 0.0_f64;
        for _ in 0..100 {
            let s = rng.gen_range(10.0..500.0);
            let r = rng.gen_range(-0.01..0.08);
            let tau = rng.gen_range(0.02..2.0);
            let k = s * rng.gen_range(0.5..1.8);
            let sigma = rng.gen_range(0.05..1.2);
            let c = ctx(s, r, tau);
            let p = call_price(&c, k, sigma).unwrap();
            let lower = (s - k * (-r * tau).exp()).max(0.0);
            if p - lower < 1e-7 * s || p < 1e-12 * s || p >= s {
                // Within cancellation noise of a band edge: the price
                // carries no recoverable volatility information.
                continue;
            }
            let iv = implied_vol(&c, k, p).unwrap();
            worst = worst.max((iv - sigma).abs());
        }
        assert!(worst < 1e-7, "worst round-trip error {worst}");
    }

    // --- strike/maturity derivatives ---

    fn flat_params(spot: f64, k_min: f64, epsilon: f64) -> AdsParams {
        // alpha ~ 0 makes sigma(m) constant at epsilon.
        AdsParams::new(1e-300, 0.0, 0.5, epsilon, k_min, spot).unwrap()
    }

    #[test]
    fn dc_dk_flat_smile_is_digital() {
        let c = ctx(100.0, 0.03, 0.4);
        let params = flat_params(100.0, 95.0, 0.2);
        let k = 110.0;
        let got = dc_dk(&c, k, &params).unwrap();
        let (_, d2) = d1_d2(100.0, k, 0.03, 0.4, 0.2);
        let expect = -(-0.03_f64 * 0.4).exp() * norm_cdf(d2);
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
        assert!(got < 0.0);
    }

    #[test]
    fn d2c_dk2_flat_smile_is_butterfly_density() {
        let c = ctx(100.0, 0.03, 0.4);
        let params = flat_params(100.0, 95.0, 0.2);
        let k = 110.0;
        let got = d2c_dk2(&c, k, &params).unwrap();
        let (_, d2) = d1_d2(100.0, k, 0.03, 0.4, 0.2);
        let expect = (-0.03_f64 * 0.4).exp() * norm_pdf(d2) / (k * 0.2 * 0.4_f64.sqrt());
        assert!(
            (got - expect).abs() / expect < 1e-5,
            "{got} vs analytic {expect}"
        );
        assert!(got > 0.0);
    }

    #[test]
    fn dc_dk_matches_finite_difference_of_priced_smile() {
        let c = ctx(100.0, 0.02, 30.0 / 365.0);
        let params = AdsParams::new(0.4, 0.3, 0.5, 0.15, 98.0, 100.0).unwrap();
        let m_min = params.m_min();
        for i in 0..100 {
            let m = 0.6 + 0.9 * i as f64 / 99.0;
            if (m - m_min).abs() < 1e-3 {
                continue;
            }
            let k = 100.0 / m;
            let h = k * 1e-6;
            let price_at = |kk: f64| {
                let sig = ads::sigma(100.0 / kk, &params);
                call_price(&c, kk, sig).unwrap()
            };
            let fd = (price_at(k + h) - price_at(k - h)) / (2.0 * h);
            let analytic = dc_dk(&c, k, &params).unwrap();
            let scale = analytic.abs().max(fd.abs()).max(1e-10);
            assert!(
                (analytic - fd).abs() / scale < 1e-4,
                "m={m}: analytic {analytic} vs fd {fd}"
            );
        }
    }

    #[test]
    fn dc_dk_itm_bound_is_equivalent_to_monotonicity() {
        // Where the volatility falls with 1/K, the slope bound
        // dsigma/d(1/K) >= -K·N(d2)/(phi(d2)·sqrt(tau)) holds iff dC/dK <= 0.
        let c = ctx(100.0, 0.02, 30.0 / 365.0);
        let params = AdsParams::new(0.4, 0.3, 0.5, 0.15, 98.0, 100.0).unwrap();
        for i in 0..200 {
            let m = 0.55 + i as f64 * 0.005;
            if (m - params.m_min()).abs() < 1e-3 {
                continue;
            }
            let k = 100.0 / m;
            let dsig_dinvk = ads::sigma_derivative(m, &params).unwrap() * 100.0;
            if dsig_dinvk >= 0.0 {
                continue;
            }
            let sigma = ads::sigma(m, &params);
            let (_, d2) = d1_d2(100.0, k, 0.02, c.tau(), sigma);
            let bound = -k * norm_cdf(d2) / (norm_pdf(d2) * c.tau().sqrt());
            let slope = dc_dk(&c, k, &params).unwrap();
            assert_eq!(
                dsig_dinvk >= bound,
                slope <= 1e-14,
                "m={m}: dsig={dsig_dinvk} bound={bound} dC/dK={slope}"
            );
        }
    }

    #[test]
    fn dc_dt_zero_rate_reduces_to_theta_term() {
        let c = ctx(100.0, 0.0, 0.5);
        let k = 105.0;
        let sigma = 0.25;
        let got = dc_dt(&c, k, sigma).unwrap();
        let (_, d2) = d1_d2(100.0, k, 0.0, 0.5, sigma);
        let expect = sigma * k * norm_pdf(d2) / (2.0 * 0.5_f64.sqrt());
        assert!((got - expect).abs() < 1e-13);
        assert!(got > 0.0);
    }

    #[test]
    fn dc_dt_low_sigma_itm_tends_to_rate_term() {
        let c = ctx(100.0, 0.05, 1.0);
        let k = 60.0;
        let got = dc_dt(&c, k, 1e-6).unwrap();
        let expect = 0.05 * 60.0 * (-0.05_f64).exp();
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn dc_dt_matches_finite_difference() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(11);
        for _ in 0..200 {
            let s = rng.gen_range(20.0..400.0);
            let r = rng.gen_range(0.0..0.08);
            let tau = rng.gen_range(0.05..1.5);
            let k = s * rng.gen_range(0.6..1.6);
            let sigma = rng.gen_range(0.08..0.9);
            let h = 1e-6;
            let up = call_price(&ctx(s, r, tau + h), k, sigma).unwrap();
            let down = call_price(&ctx(s, r, tau - h), k, sigma).unwrap();
            let fd = (up - down) / (2.0 * h);
            let analytic = dc_dt(&ctx(s, r, tau), k, sigma).unwrap();
            let scale = analytic.abs().max(fd.abs()).max(1e-10);
            assert!(
                (analytic - fd).abs() / scale < 1e-5,
                "s={s} k={k} tau={tau} sigma={sigma}: {analytic} vs {fd}"
            );
        }
    }
}
