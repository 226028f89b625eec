//! Numeric verification that a calibrated smile surface is arbitrage-free.
//!
//! Five conditions are checked on the call pricing function `C(T, K)` built
//! from the closed-form smile:
//!
//! 1. monotonicity and convexity in strike (`∂C/∂K ≤ 0`, `∂²C/∂K² ≥ 0`);
//! 2. vanishing large-strike limit;
//! 3. the static band `(S − K·e^(−rτ))⁺ ≤ C ≤ S`;
//! 4. convergence to the payoff `(S − K)⁺` as `τ → 0⁺`;
//! 5. calendar monotonicity (`∂C/∂T ≥ 0`).
//!
//! Alongside them, parameter admissibility: `δ ∈ (0, 1)` and `|β|` below the
//! moneyness-dependent bound of [`crate::ads::beta_admissible_bound`].
//!
//! The checker reports; it never rejects or repairs a parameter set. Grids
//! exclude a narrow band around the smile minimum where the volatility
//! derivative is singular.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ads::{self, AdsParams};
use crate::error::{Result, SmileError};
use crate::pricing::{self, PricingContext};

/// Slope tolerance for condition i, scaled by spot.
pub const TOL_SLOPE_PER_SPOT: f64 = 1e-8;
/// Convexity tolerance for condition i.
pub const TOL_CONVEX: f64 = 1e-8;
/// Band tolerance for condition iii, scaled by spot.
pub const TOL_BAND_PER_SPOT: f64 = 1e-8;
/// Calendar tolerance for condition v, scaled by spot.
pub const TOL_CALENDAR_PER_SPOT: f64 = 1e-8;
/// Time to expiry at which the payoff limit (condition iv) is probed.
pub const PAYOFF_TAU: f64 = 1e-6;
/// Exclusion half-width around `m_min` in moneyness units.
pub const MIN_BAND: f64 = 1e-4;
/// Strike multiple probing the large-strike limit (condition ii).
pub const LIMIT_STRIKE_FACTOR: f64 = 1e6;
/// Price threshold (relative to spot) at the large-strike probe.
pub const LIMIT_PRICE_PER_SPOT: f64 = 1e-8;

/// Where on the grid a violation was found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLocation {
    /// Strike of the worst violation.
    pub strike: f64,
    /// Maturity of the worst violation (calendar condition only).
    pub maturity: Option<f64>,
}

/// Outcome of one condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    /// Whether the condition held everywhere on the grid.
    pub passed: bool,
    /// Magnitude of the worst violation (0 when passed).
    pub worst_violation: f64,
    /// Grid node of the worst violation.
    pub location: Option<GridLocation>,
}

impl ConditionVerdict {
    fn from_scan(worst: f64, location: Option<GridLocation>) -> Self {
        Self {
            passed: worst <= 0.0,
            worst_violation: worst.max(0.0),
            location: if worst > 0.0 { location } else { None },
        }
    }
}

/// Parameter admissibility verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    /// `|β|` below the grid minimum of the admissible bound.
    pub beta_ok: bool,
    /// `min_grid B(m) − |β|`; negative when inadmissible.
    pub beta_margin: f64,
    /// `δ` strictly inside `(0, 1)`.
    pub delta_ok: bool,
}

/// Strike-grid policy actually used by a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Log-spaced strikes across the core moneyness range.
    pub n_core: usize,
    /// Extra strikes in each tail.
    pub n_tail: usize,
    /// Core range in multiples of `m_min`: `[lo, hi]`.
    pub core_range: (f64, f64),
    /// Tail reach in multiples of `m_min`: `(otm, itm)`.
    pub tail_range: (f64, f64),
    /// Excluded half-width around `m_min`.
    pub band: f64,
    /// Strikes that survived the band exclusion.
    pub n_strikes: usize,
}

/// Butterfly-side verdicts (conditions i-iv).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ButterflyReport {
    /// Condition i, `∂C/∂K ≤ 0`.
    pub i_monotone: ConditionVerdict,
    /// Condition i, `∂²C/∂K² ≥ 0`.
    pub i_convex: ConditionVerdict,
    /// Condition ii, vanishing price at the large-strike probe.
    pub ii_limit: ConditionVerdict,
    /// Condition iii, the static price band.
    pub iii_band: ConditionVerdict,
    /// Condition iv, payoff limit at `τ → 0⁺`.
    pub iv_payoff: ConditionVerdict,
}

/// The full arbitrage report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArbReport {
    /// Condition i, monotonicity in strike.
    pub i_monotone: ConditionVerdict,
    /// Condition i, convexity in strike.
    pub i_convex: ConditionVerdict,
    /// Condition ii, large-strike limit.
    pub ii_limit: ConditionVerdict,
    /// Condition iii, static band.
    pub iii_band: ConditionVerdict,
    /// Condition iv, payoff limit.
    pub iv_payoff: ConditionVerdict,
    /// Condition v, calendar monotonicity.
    pub v_calendar: ConditionVerdict,
    /// Parameter admissibility.
    pub admissibility: Admissibility,
    /// Grid policy used.
    pub grid: GridSpec,
}

impl ArbReport {
    /// True when every condition and both admissibility checks pass.
    pub fn all_passed(&self) -> bool {
        self.i_monotone.passed
            && self.i_convex.passed
            && self.ii_limit.passed
            && self.iii_band.passed
            && self.iv_payoff.passed
            && self.v_calendar.passed
            && self.admissibility.beta_ok
            && self.admissibility.delta_ok
    }

    /// `(name, verdict)` rows in report order.
    pub fn rows(&self) -> [(&'static str, ConditionVerdict); 6] {
        [
            ("i_monotone", self.i_monotone),
            ("i_convex", self.i_convex),
            ("ii_limit", self.ii_limit),
            ("iii_band", self.iii_band),
            ("iv_payoff", self.iv_payoff),
            ("v_calendar", self.v_calendar),
        ]
    }
}

/// Default strike grid: 200 log-spaced strikes over `m ∈ [0.5, 2.0]·m_min`
/// plus 50 in each tail (out to `0.1·m_min` and `2.5·m_min`), the `m_min`
/// band excluded. Strikes come out ascending. The tails stop where the
/// quadratic wing growth starts to genuinely break convexity for large
/// `alpha`, which is outside any quoted strike universe.
pub fn default_strike_grid(params: &AdsParams) -> (Vec<f64>, GridSpec) {
    let m_min = params.m_min();
    let n_core = 200;
    let n_tail = 50;
    let core = (0.5, 2.0);
    let tails = (0.1, 2.5);

    let mut moneyness = Vec::with_capacity(n_core + 2 * n_tail);
    let log_span = |lo: f64, hi: f64, n: usize, out: &mut Vec<f64>| {
        let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
        for i in 0..n {
            let t = i as f64 / (n - 1) as f64;
            out.push((ln_lo + t * (ln_hi - ln_lo)).exp());
        }
    };
    log_span(tails.0 * m_min, core.0 * m_min, n_tail, &mut moneyness);
    log_span(core.0 * m_min, core.1 * m_min, n_core, &mut moneyness);
    log_span(core.1 * m_min, tails.1 * m_min, n_tail, &mut moneyness);

    let mut strikes: Vec<f64> = moneyness
        .iter()
        .filter(|&&m| (m - m_min).abs() >= MIN_BAND)
        .map(|&m| params.spot / m)
        .collect();
    strikes.sort_by(|a, b| a.total_cmp(b));
    strikes.dedup();
    let spec = GridSpec {
        n_core,
        n_tail,
        core_range: core,
        tail_range: tails,
        band: MIN_BAND,
        n_strikes: strikes.len(),
    };
    (strikes, spec)
}

/// Default maturity grid for the calendar check: fractions and multiples of
/// the context's own time to expiry.
pub fn default_maturity_grid(ctx: &PricingContext) -> Vec<f64> {
    let tau = ctx.tau();
    [0.25, 0.5, 0.75, 1.0, 1.5, 2.0]
        .iter()
        .map(|f| ctx.now + f * tau)
        .collect()
}

fn validate_grid(ctx: &PricingContext, params: &AdsParams, strikes: &[f64]) -> Result<()> {
    if strikes.len() < 2 {
        return Err(SmileError::invalid("strike grid needs at least 2 points"));
    }
    let m_min = params.m_min();
    for &k in strikes {
        if !(k > 0.0) {
            return Err(SmileError::invalid("strikes must be positive"));
        }
        let m = ctx.spot / k;
        if (m - m_min).abs() < MIN_BAND {
            return Err(SmileError::invalid(format!(
                "strike {k} lies inside the excluded band around the smile minimum"
            )));
        }
    }
    Ok(())
}

/// Check the butterfly conditions i-iv on a strike grid.
pub fn check_butterfly(
    ctx: &PricingContext,
    params: &AdsParams,
    strikes: &[f64],
) -> Result<ButterflyReport> {
    validate_grid(ctx, params, strikes)?;
    let spot = ctx.spot;
    let tau = ctx.tau();
    if !(tau > 0.0) {
        return Err(SmileError::invalid("butterfly check requires positive tau"));
    }
    let tol_slope = TOL_SLOPE_PER_SPOT * spot;
    let tol_band = TOL_BAND_PER_SPOT * spot;
    let discount = (-ctx.rate * tau).exp();

    // Per-strike quantities, evaluated in parallel, reduced in grid order.
    struct Node {
        strike: f64,
        slope_excess: f64,
        convex_excess: f64,
        band_excess: f64,
        payoff_excess: f64,
    }

    let ctx_payoff = PricingContext::new(spot, ctx.rate, ctx.now, ctx.now + PAYOFF_TAU)?;
    let sigma_max = strikes
        .iter()
        .map(|&k| ads::sigma(spot / k, params))
        .fold(0.0_f64, f64::max);
    let tol_payoff = spot * sigma_max * PAYOFF_TAU.sqrt();

    let nodes: Vec<Result<Node>> = strikes
        .par_iter()
        .map(|&k| {
            let m = spot / k;
            let sigma = ads::sigma(m, params);
            let slope = pricing::dc_dk(ctx, k, params)?;
            let convex = pricing::d2c_dk2(ctx, k, params)?;
            let price = pricing::call_price(ctx, k, sigma)?;
            let intrinsic = (spot - k * discount).max(0.0);
            let band_excess = (intrinsic - tol_band - price).max(price - spot - tol_band);
            let payoff_price = pricing::call_price(&ctx_payoff, k, ads::sigma(m, params))?;
            let payoff_excess = ((payoff_price - (spot - k).max(0.0)).abs() - tol_payoff).max(0.0);
            Ok(Node {
                strike: k,
                slope_excess: slope - tol_slope,
                convex_excess: -(convex + TOL_CONVEX),
                band_excess,
                payoff_excess,
            })
        })
        .collect();

    let mut worst_slope = (f64::NEG_INFINITY, 0.0);
    let mut worst_convex = (f64::NEG_INFINITY, 0.0);
    let mut worst_band = (f64::NEG_INFINITY, 0.0);
    let mut worst_payoff = (f64::NEG_INFINITY, 0.0);
    for node in nodes {
        let node = node?;
        for (worst, value) in [
            (&mut worst_slope, node.slope_excess),
            (&mut worst_convex, node.convex_excess),
            (&mut worst_band, node.band_excess),
            (&mut worst_payoff, node.payoff_excess),
        ] {
            if value > worst.0 {
                *worst = (value, node.strike);
            }
        }
    }
    let verdict = |(worst, strike): (f64, f64)| {
        ConditionVerdict::from_scan(
            worst,
            Some(GridLocation {
                strike,
                maturity: None,
            }),
        )
    };

    // Condition ii: the price at a far strike must have decayed to nothing.
    let k_limit = LIMIT_STRIKE_FACTOR * spot;
    let sigma_limit = ads::sigma(spot / k_limit, params);
    let price_limit = pricing::call_price(ctx, k_limit, sigma_limit)?;
    let ii_excess = price_limit - LIMIT_PRICE_PER_SPOT * spot;
    let ii_limit = ConditionVerdict::from_scan(
        ii_excess,
        Some(GridLocation {
            strike: k_limit,
            maturity: None,
        }),
    );

    Ok(ButterflyReport {
        i_monotone: verdict(worst_slope),
        i_convex: verdict(worst_convex),
        ii_limit,
        iii_band: verdict(worst_band),
        iv_payoff: verdict(worst_payoff),
    })
}

/// Check the calendar condition v on a maturity times strike grid.
pub fn check_calendar(
    ctx: &PricingContext,
    params: &AdsParams,
    maturities: &[f64],
) -> Result<ConditionVerdict> {
    if maturities.is_empty() {
        return Err(SmileError::invalid("maturity grid must not be empty"));
    }
    for w in maturities.windows(2) {
        if !(w[1] > w[0]) {
            return Err(SmileError::invalid("maturities must be strictly ascending"));
        }
    }
    if maturities[0] <= ctx.now {
        return Err(SmileError::invalid(
            "maturities must come after the valuation time",
        ));
    }
    let (strikes, _) = default_strike_grid(params);
    let tol = TOL_CALENDAR_PER_SPOT * ctx.spot;

    let worst: Vec<Result<(f64, f64, f64)>> = maturities
        .par_iter()
        .map(|&t_exp| {
            let ctx_t = PricingContext::new(ctx.spot, ctx.rate, ctx.now, t_exp)?;
            let mut worst = (f64::NEG_INFINITY, 0.0, t_exp);
            for &k in &strikes {
                let sigma = ads::sigma(ctx.spot / k, params);
                let theta = pricing::dc_dt(&ctx_t, k, sigma)?;
                let excess = -(theta + tol);
                if excess > worst.0 {
                    worst = (excess, k, t_exp);
                }
            }
            Ok(worst)
        })
        .collect();

    let mut overall = (f64::NEG_INFINITY, 0.0, 0.0);
    for w in worst {
        let w = w?;
        if w.0 > overall.0 {
            overall = w;
        }
    }
    Ok(ConditionVerdict::from_scan(
        overall.0,
        Some(GridLocation {
            strike: overall.1,
            maturity: Some(overall.2),
        }),
    ))
}

/// Check parameter admissibility: `δ ∈ (0, 1)` and `|β|` under the grid
/// minimum of the admissible bound.
pub fn check_admissibility(params: &AdsParams, strikes: &[f64]) -> Admissibility {
    let delta_ok = params.delta > 0.0 && params.delta < 1.0;
    let mut min_bound = f64::INFINITY;
    for &k in strikes {
        let m = params.spot / k;
        if let Ok(bound) = ads::beta_admissible_bound(m, params) {
            min_bound = min_bound.min(bound);
        }
    }
    let beta_margin = min_bound - params.beta.abs();
    Admissibility {
        beta_ok: beta_margin > 0.0 && min_bound > 0.0,
        beta_margin,
        delta_ok,
    }
}

/// Run the full battery on the default grids and assemble one report.
pub fn check_surface(ctx: &PricingContext, params: &AdsParams) -> Result<ArbReport> {
    let (strikes, grid) = default_strike_grid(params);
    let butterfly = check_butterfly(ctx, params, &strikes)?;
    let calendar = check_calendar(ctx, params, &default_maturity_grid(ctx))?;
    let admissibility = check_admissibility(params, &strikes);
    Ok(ArbReport {
        i_monotone: butterfly.i_monotone,
        i_convex: butterfly.i_convex,
        ii_limit: butterfly.ii_limit,
        iii_band: butterfly.iii_band,
        iv_payoff: butterfly.iv_payoff,
        v_calendar: calendar,
        admissibility,
        grid,
    })
}
