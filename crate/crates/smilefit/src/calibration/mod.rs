//! Bounded global calibration of smile models by RMSE minimization.
//!
//! The search runs in three deterministic phases: scrambled-Halton
//! quasi-random exploration over the first ⌈n/4⌉ trials, tree-structured
//! Parzen sampling ([`tpe`]) for the remainder, and a bounded Nelder-Mead
//! polish ([`nelder_mead`]) from the best trial. Everything is driven by one
//! seeded stream, so a `(slice, budget, seed)` triple fully determines the
//! result.
//!
//! Scale parameters (`alpha`, `epsilon`, `nu`) are searched log-uniformly;
//! failed model evaluations contribute the penalty value [`PENALTY`] instead
//! of aborting the trial loop.

pub mod nelder_mead;
pub mod tpe;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::ads::{self, AdsParams};
use crate::baselines::{fsabr_smile, sabr_implied_vol, FsabrParams, McConfig, SabrParams};
use crate::error::{Result, SmileError};
use crate::marketdata::QuoteSlice;
use crate::metrics::SmileCurve;
use crate::pricing::PricingContext;
use crate::rng::mix_seed;

/// Objective value recorded for a failed model evaluation.
pub const PENALTY: f64 = 1e6;

/// Which smile model a search space or fit refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelTag {
    /// The closed-form implied-regularity smile.
    Ads,
    /// Hagan lognormal SABR.
    Sabr,
    /// Monte-Carlo fractional SABR.
    Fsabr,
}

impl ModelTag {
    /// All models, in fixed order.
    pub const ALL: [ModelTag; 3] = [ModelTag::Ads, ModelTag::Sabr, ModelTag::Fsabr];

    /// Stable lowercase name.
    pub fn name(&self) -> &'static str {
        match self {
            ModelTag::Ads => "ads",
            ModelTag::Sabr => "sabr",
            ModelTag::Fsabr => "fsabr",
        }
    }
}

impl std::fmt::Display for ModelTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelTag {
    type Err = SmileError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ads" => Ok(ModelTag::Ads),
            "sabr" => Ok(ModelTag::Sabr),
            "fsabr" => Ok(ModelTag::Fsabr),
            other => Err(SmileError::invalid(format!(
                "unknown model '{other}' (expected ads|sabr|fsabr)"
            ))),
        }
    }
}

/// One coordinate of a search box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    /// Parameter name, stable across runs.
    pub name: &'static str,
    /// Lower bound (inclusive).
    pub lo: f64,
    /// Upper bound (inclusive).
    pub hi: f64,
    /// Sample log-uniformly instead of uniformly.
    pub log_scale: bool,
}

impl ParamSpec {
    /// Map a natural value into the unit interval.
    fn encode(&self, x: f64) -> f64 {
        let u = if self.log_scale {
            (x / self.lo).ln() / (self.hi / self.lo).ln()
        } else {
            (x - self.lo) / (self.hi - self.lo)
        };
        u.clamp(0.0, 1.0)
    }

    /// Map a unit coordinate back to a natural value.
    fn decode(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        if self.log_scale {
            self.lo * (self.hi / self.lo).powf(u)
        } else {
            self.lo + u * (self.hi - self.lo)
        }
    }
}

/// Bounded search box for one model.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    /// The model being calibrated.
    pub model: ModelTag,
    /// Per-parameter bounds, in the model's canonical parameter order.
    pub params: Vec<ParamSpec>,
}

impl SearchSpace {
    /// Default box for a model.
    pub fn for_model(model: ModelTag) -> Self {
        let spec = |name, lo, hi, log_scale| ParamSpec {
            name,
            lo,
            hi,
            log_scale,
        };
        let params = match model {
            ModelTag::Ads => vec![
                spec("alpha", 1e-4, 10.0, true),
                spec("beta", -1.0, 1.0, false),
                spec("delta", ads::DELTA_MARGIN, 1.0 - ads::DELTA_MARGIN, false),
                spec("epsilon", 1e-4, 1.0, true),
            ],
            ModelTag::Sabr => vec![
                spec("alpha0", 1e-3, 3.0, true),
                spec("rho", -0.999, 0.999, false),
                spec("nu", 1e-4, 5.0, true),
            ],
            ModelTag::Fsabr => vec![
                spec("alpha0", 1e-3, 3.0, true),
                spec("rho", -0.999, 0.999, false),
                spec("nu", 1e-4, 5.0, true),
                spec("hurst", 0.01, 0.99, false),
            ],
        };
        Self { model, params }
    }

    /// Dimension of the box.
    pub fn dim(&self) -> usize {
        self.params.len()
    }

    /// Whether a natural-space point lies inside the box.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.params.len()
            && x.iter()
                .zip(&self.params)
                .all(|(&v, p)| v >= p.lo && v <= p.hi && v.is_finite())
    }

    /// Map unit coordinates to a natural-space point.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(&self.params)
            .map(|(&ui, p)| p.decode(ui))
            .collect()
    }

    /// Map a natural-space point into unit coordinates.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.params)
            .map(|(&xi, p)| p.encode(xi))
            .collect()
    }
}

/// One evaluated trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    /// Trial index; the Nelder-Mead polish is appended at index `n_trials`.
    pub index: usize,
    /// Natural-space parameter vector.
    pub params: Vec<f64>,
    /// RMSE (or [`PENALTY`] for a failed evaluation).
    pub objective: f64,
}

/// Outcome of one calibration run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    /// Calibrated model.
    pub model: ModelTag,
    /// Parameter names matching `params`.
    pub param_names: Vec<String>,
    /// Best parameter vector found.
    pub params: Vec<f64>,
    /// Best RMSE found (minimum over `history`).
    pub rmse: f64,
    /// Trial budget (polish excluded).
    pub n_trials: usize,
    /// Seed the run was driven by.
    pub seed: u64,
    /// Every evaluated trial, plus the polish as the final entry.
    pub history: Vec<Trial>,
    /// Wall-clock duration (not serialized; reruns stay byte-identical).
    #[serde(skip, default)]
    pub wall_time: Duration,
}

impl FitResult {
    /// Look up a calibrated parameter by name.
    pub fn param(&self, name: &str) -> Option<f64> {
        self.param_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.params[i])
    }
}

/// Resolved parameters of any model, ready for evaluation.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    /// Closed-form smile parameters.
    Ads(AdsParams),
    /// Hagan SABR parameters.
    Sabr(SabrParams),
    /// Fractional SABR parameters.
    Fsabr(FsabrParams),
}

/// Build model parameters from a search-space vector. For the closed-form
/// model, `k_min` and the spot come from the slice and stay fixed.
pub fn model_params(model: ModelTag, x: &[f64], slice: &QuoteSlice) -> Result<ModelParams> {
    match model {
        ModelTag::Ads => {
            if x.len() != 4 {
                return Err(SmileError::invalid("ads expects 4 parameters"));
            }
            Ok(ModelParams::Ads(AdsParams::new(
                x[0],
                x[1],
                x[2],
                x[3],
                slice.k_min,
                slice.spot,
            )?))
        }
        ModelTag::Sabr => {
            if x.len() != 3 {
                return Err(SmileError::invalid("sabr expects 3 parameters"));
            }
            Ok(ModelParams::Sabr(SabrParams::new(x[0], x[1], x[2])?))
        }
        ModelTag::Fsabr => {
            if x.len() != 4 {
                return Err(SmileError::invalid("fsabr expects 4 parameters"));
            }
            Ok(ModelParams::Fsabr(FsabrParams::new(
                SabrParams::new(x[0], x[1], x[2])?,
                x[3],
            )?))
        }
    }
}

/// Evaluate a model smile on the slice's own moneyness grid.
///
/// Fails when any strike cannot be evaluated (for the Monte-Carlo model this
/// includes prices outside the inversion band), so the caller can decide
/// between penalizing and intersecting grids.
pub fn model_smile(
    model: ModelTag,
    x: &[f64],
    slice: &QuoteSlice,
    mc: &McConfig,
) -> Result<SmileCurve> {
    let params = model_params(model, x, slice)?;
    let ctx = PricingContext::with_tau(slice.spot, slice.rate, slice.tau)?;
    let points: Vec<(f64, f64)> = match params {
        ModelParams::Ads(p) => slice
            .points
            .iter()
            .map(|pt| (pt.moneyness, ads::sigma(pt.moneyness, &p)))
            .collect(),
        ModelParams::Sabr(p) => {
            let mut pts = Vec::with_capacity(slice.points.len());
            for pt in &slice.points {
                pts.push((pt.moneyness, sabr_implied_vol(&ctx, pt.strike, &p)?));
            }
            pts
        }
        ModelParams::Fsabr(p) => {
            let strikes = slice.strikes();
            let smile = fsabr_smile(&ctx, &strikes, &p, mc)?;
            if smile.len() != strikes.len() {
                return Err(SmileError::Numerical {
                    message: format!(
                        "{} of {} strikes fell outside the inversion band",
                        strikes.len() - smile.len(),
                        strikes.len()
                    ),
                });
            }
            slice
                .points
                .iter()
                .zip(&smile)
                .map(|(pt, (_, iv))| (pt.moneyness, *iv))
                .collect()
        }
    };
    SmileCurve::new(points)
}

/// Smile-fit RMSE of a parameter vector; [`PENALTY`] on evaluation failure.
pub fn rmse_objective(slice: &QuoteSlice, model: ModelTag, x: &[f64], mc: &McConfig) -> f64 {
    let curve = match model_smile(model, x, slice, mc) {
        Ok(c) => c,
        Err(_) => return PENALTY,
    };
    let n = curve.len() as f64;
    let sum_sq: f64 = curve
        .points()
        .iter()
        .zip(&slice.points)
        .map(|(m, o)| (m.1 - o.iv) * (m.1 - o.iv))
        .sum();
    let rmse = (sum_sq / n).sqrt();
    if rmse.is_finite() {
        rmse
    } else {
        PENALTY
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const HALTON_BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];

fn halton_point(index: usize, dim: usize, shifts: &[f64]) -> Vec<f64> {
    (0..dim)
        .map(|d| {
            let v = radical_inverse(index as u64 + 1, HALTON_BASES[d]) + shifts[d];
            v - v.floor()
        })
        .collect()
}

/// Calibrate one model on one slice.
///
/// Runs ⌈n/4⌉ scrambled-Halton exploration trials, TPE sampling for the rest,
/// and a two-stage Nelder-Mead polish appended to the history at index
/// `n_trials`. Deterministic in `(slice, space, n_trials, seed, mc)`.
pub fn calibrate(
    slice: &QuoteSlice,
    space: &SearchSpace,
    n_trials: usize,
    seed: u64,
    mc: &McConfig,
) -> Result<FitResult> {
    if n_trials == 0 {
        return Err(SmileError::invalid("empty trial budget"));
    }
    let start = Instant::now();
    let dim = space.dim();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let shifts: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>()).collect();
    let tpe_cfg = tpe::TpeConfig::default();

    let n_explore = n_trials.div_ceil(4);
    let mut unit_history: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n_trials + 1);
    let mut history: Vec<Trial> = Vec::with_capacity(n_trials + 1);
    for index in 0..n_trials {
        let u = if index < n_explore {
            halton_point(index, dim, &shifts)
        } else {
            tpe::propose(&unit_history, dim, &tpe_cfg, &mut rng)
        };
        let x = space.from_unit(&u);
        let objective = rmse_objective(slice, space.model, &x, mc);
        unit_history.push((u, objective));
        history.push(Trial {
            index,
            params: x,
            objective,
        });
    }

    let best_trial = history
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.objective.total_cmp(&b.1.objective))
        .map(|(i, _)| i)
        .expect("n_trials >= 1");
    if history[best_trial].objective >= PENALTY {
        return Err(SmileError::Calibration {
            message: format!(
                "all {n_trials} trials penalized for model {}; best objective {}",
                space.model, history[best_trial].objective
            ),
        });
    }

    // Two-stage polish: a coarse simplex from the best trial, then a tight
    // one from wherever it lands.
    let lo = vec![0.0; dim];
    let hi = vec![1.0; dim];
    let objective_unit = |u: &[f64]| rmse_objective(slice, space.model, &space.from_unit(u), mc);
    let stage1 = nelder_mead::minimize_bounded(
        objective_unit,
        &unit_history[best_trial].0,
        &lo,
        &hi,
        0.08,
        250,
        1e-12,
    );
    let stage2 =
        nelder_mead::minimize_bounded(objective_unit, &stage1.x, &lo, &hi, 0.02, 250, 1e-12);
    let polished = if stage2.fval <= stage1.fval {
        stage2
    } else {
        stage1
    };
    history.push(Trial {
        index: n_trials,
        params: space.from_unit(&polished.x),
        objective: polished.fval,
    });

    let best = history
        .iter()
        .min_by(|a, b| a.objective.total_cmp(&b.objective))
        .expect("history non-empty")
        .clone();

    Ok(FitResult {
        model: space.model,
        param_names: space.params.iter().map(|p| p.name.to_string()).collect(),
        params: best.params,
        rmse: best.objective,
        n_trials,
        seed,
        history,
        wall_time: start.elapsed(),
    })
}

/// Calibrate every model on the same slice with the same budget.
///
/// Per-model seeds derive deterministically from the base seed; a failure in
/// one model does not abort the others.
pub fn calibrate_all(
    slice: &QuoteSlice,
    n_trials: usize,
    seed: u64,
    mc: &McConfig,
) -> BTreeMap<ModelTag, Result<FitResult>> {
    let mut out = BTreeMap::new();
    for (i, tag) in ModelTag::ALL.iter().enumerate() {
        let space = SearchSpace::for_model(*tag);
        let model_seed = mix_seed(seed, i as u64);
        out.insert(*tag, calibrate(slice, &space, n_trials, model_seed, mc));
    }
    out
}
