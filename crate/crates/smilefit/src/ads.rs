//! The moneyness-coupled implied-volatility model and its Hurst function.
//!
//! Working in moneyness `m = S/K` with `m_min = S/K_min` (the moneyness of the
//! minimum-volatility strike) and the offset `g = m − m_min`, the smile is
//!
//! ```text
//! σ(m) = α·g²·exp(−β·H(m)·g) + ε
//! H(m) = ½·(1 + |1 − m_min|^δ) / (1 + |g|^δ)
//! ```
//!
//! The quadratic term carries the smile shape, the exponential modulates its
//! decay through the memory level `H`, and `ε` floors the volatility. `H` is
//! built so that `H(1) = ½` exactly: at-the-money the implied regularity is
//! Brownian. All derivatives here are with respect to `m`; callers working in
//! strike or `1/K` units apply their own chain-rule factors.
//!
//! Admissible shapes require `δ ∈ (0, 1)` and `|β|` below a moneyness-dependent
//! bound (see [`beta_admissible_bound`]); the checks in [`crate::arbitrage`]
//! verify both.

use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Result, SmileError};

/// Clamp margin keeping `δ` strictly inside (0, 1).
pub const DELTA_MARGIN: f64 = 1e-6;

/// Bound on the volatility exponent `−β·H·g`; beyond it the exponential is
/// clamped so extreme trial parameters cannot overflow during calibration.
const EXP_CLAMP: f64 = 50.0;

static EXP_CLAMP_WARNED: AtomicBool = AtomicBool::new(false);

/// Smile-model parameter set.
///
/// `alpha` scales the quadratic term, `beta` couples the memory decay,
/// `delta` steers the shape of the Hurst function, `epsilon` floors the
/// volatility, and `(k_min, spot)` anchor the moneyness frame. Fields are
/// public so diagnostic tools can represent out-of-range parameter sets;
/// [`AdsParams::new`] is the validating path used by calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdsParams {
    /// Volatility scale, `> 0`.
    pub alpha: f64,
    /// Memory-decay coupling, admissible in `[-1, 1]`.
    pub beta: f64,
    /// Hurst-shape steepness, admissible in `(0, 1)`.
    pub delta: f64,
    /// Volatility floor, `> 0`.
    pub epsilon: f64,
    /// Strike of minimal observed implied volatility.
    pub k_min: f64,
    /// Spot price fixing the moneyness frame.
    pub spot: f64,
}

impl AdsParams {
    /// Validated constructor. `delta` is clamped into
    /// `[DELTA_MARGIN, 1 − DELTA_MARGIN]` after the open-interval check.
    pub fn new(
        alpha: f64,
        beta: f64,
        delta: f64,
        epsilon: f64,
        k_min: f64,
        spot: f64,
    ) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            delta,
            epsilon,
            k_min,
            spot,
        };
        p.validate()?;
        Ok(Self {
            delta: delta.clamp(DELTA_MARGIN, 1.0 - DELTA_MARGIN),
            ..p
        })
    }

    /// Check the full admissibility invariants.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("epsilon", self.epsilon),
            ("k_min", self.k_min),
            ("spot", self.spot),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SmileError::invalid(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !self.beta.is_finite() || self.beta.abs() > 1.0 {
            return Err(SmileError::invalid(format!(
                "beta must lie in [-1, 1], got {}",
                self.beta
            )));
        }
        if !self.delta.is_finite() || self.delta <= 0.0 || self.delta >= 1.0 {
            return Err(SmileError::invalid(format!(
                "delta must lie strictly in (0, 1), got {}",
                self.delta
            )));
        }
        Ok(())
    }

    /// Moneyness of the minimum-volatility strike, `m_min = S/K_min`.
    pub fn m_min(&self) -> f64 {
        self.spot / self.k_min
    }
}

/// A moneyness sample resolved against a parameter frame: the moneyness `m`,
/// the smile-minimum moneyness `m_min`, and their offset `g = m − m_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoneynessPoint {
    /// Moneyness `S/K`.
    pub m: f64,
    /// Moneyness of the minimum-volatility strike.
    pub m_min: f64,
    /// Offset `m − m_min`.
    pub g: f64,
}

impl MoneynessPoint {
    /// Resolve a moneyness against the parameter frame.
    pub fn new(m: f64, params: &AdsParams) -> Self {
        let m_min = params.m_min();
        Self {
            m,
            m_min,
            g: m - m_min,
        }
    }
}

fn clamped_exp(x: f64) -> f64 {
    if x.abs() > EXP_CLAMP {
        if !EXP_CLAMP_WARNED.swap(true, Ordering::Relaxed) {
            log::warn!("volatility exponent {x:.2} clamped to +/-{EXP_CLAMP}");
        }
        x.clamp(-EXP_CLAMP, EXP_CLAMP).exp()
    } else {
        x.exp()
    }
}

/// Moneyness-dependent Hurst exponent `H(m)`.
///
/// Equals ½ exactly at `m = 1` for any parameter set, and attains its
/// supremum at `m = m_min` where the denominator collapses to 1.
pub fn hurst(m: f64, params: &AdsParams) -> f64 {
    debug_assert!(m > 0.0, "moneyness must be positive");
    let pt = MoneynessPoint::new(m, params);
    let num = 1.0 + (1.0 - pt.m_min).abs().powf(params.delta);
    let den = 1.0 + pt.g.abs().powf(params.delta);
    0.5 * num / den
}

/// Model implied volatility `σ(m)`.
///
/// Returns exactly `epsilon` at `m = m_min` (the quadratic term vanishes) and
/// stays strictly positive everywhere.
pub fn sigma(m: f64, params: &AdsParams) -> f64 {
    debug_assert!(m > 0.0, "moneyness must be positive");
    let g = m - params.m_min();
    params.alpha * g * g * clamped_exp(-params.beta * hurst(m, params) * g) + params.epsilon
}

fn require_off_minimum(m: f64, params: &AdsParams) -> Result<f64> {
    let g = m - params.m_min();
    if g == 0.0 {
        return Err(SmileError::Singular {
            m_min: params.m_min(),
        });
    }
    Ok(g)
}

/// Analytic derivative `dH/dm`.
///
/// ```text
/// dH/dm = −sgn(g) · H(m) · δ·|g|^(δ−1) / (1 + |g|^δ)
/// ```
///
/// Positive left of `m_min`, negative right of it. For `δ < 1` the factor
/// `|g|^(δ−1)` diverges as `g → 0`, so evaluation at `m = m_min` is an error.
pub fn hurst_derivative(m: f64, params: &AdsParams) -> Result<f64> {
    let g = require_off_minimum(m, params)?;
    let abs_g = g.abs();
    let h = hurst(m, params);
    let d = params.delta;
    Ok(-g.signum() * h * d * abs_g.powf(d - 1.0) / (1.0 + abs_g.powf(d)))
}

/// Shared bracket `(1 + (1−δ)|g|^δ) / (1 + |g|^δ)`, which is
/// `(H + g·dH/dm) / H`.
fn memory_bracket(g: f64, delta: f64) -> f64 {
    let gd = g.abs().powf(delta);
    (1.0 + (1.0 - delta) * gd) / (1.0 + gd)
}

/// Analytic derivative `dσ/dm`.
///
/// Differentiating the primal formula (the constant floor `ε` drops out):
///
/// ```text
/// dσ/dm = (σ(m) − ε) · { 2/g − β·H(m)·(1 + (1−δ)|g|^δ)/(1 + |g|^δ) }
/// ```
///
/// Wherever `|β|` stays below [`beta_admissible_bound`], the sign equals
/// `sgn(g)`: the smile falls toward its minimum and rises away from it.
pub fn sigma_derivative(m: f64, params: &AdsParams) -> Result<f64> {
    let g = require_off_minimum(m, params)?;
    let h = hurst(m, params);
    let quad = sigma(m, params) - params.epsilon;
    Ok(quad * (2.0 / g - params.beta * h * memory_bracket(g, params.delta)))
}

/// Right-hand side `B(m)` of the admissibility interval `|β| < B(m)`:
///
/// ```text
/// B(m) = 2 / ( H(m) · |g| · (1 + (1−δ)|g|^δ)/(1 + |g|^δ) )
/// ```
///
/// Positive for every `δ ∈ (0, 1)`; a non-positive value (possible only when
/// `δ > 1` is forced through) signals an inadmissible shape parameter.
pub fn beta_admissible_bound(m: f64, params: &AdsParams) -> Result<f64> {
    let g = require_off_minimum(m, params)?;
    let h = hurst(m, params);
    Ok(2.0 / (h * g.abs() * memory_bracket(g, params.delta)))
}

/// Large-strike limits `(H∞, σ∞)` as `K → ∞`, i.e. `m → 0`:
///
/// ```text
/// H∞ = ½·(1 + |1 − m_min|^δ) / (1 + m_min^δ)
/// σ∞ = α·m_min²·exp(β·m_min·H∞) + ε
/// ```
pub fn sigma_limits(params: &AdsParams) -> (f64, f64) {
    let m_min = params.m_min();
    let d = params.delta;
    let h_inf = 0.5 * (1.0 + (1.0 - m_min).abs().powf(d)) / (1.0 + m_min.powf(d));
    let sigma_inf =
        params.alpha * m_min * m_min * clamped_exp(params.beta * m_min * h_inf) + params.epsilon;
    (h_inf, sigma_inf)
}
