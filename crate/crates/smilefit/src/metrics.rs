//! Fit-quality metrics, discrete smile curvature, cross-slice summary
//! statistics, and the implied-regularity regression estimator.
//!
//! Curvature is the second difference of implied volatility in moneyness.
//! The default stencil divides by the squared forward spacing,
//!
//! ```text
//! C_i = (σ_{i+1} − 2σ_i + σ_{i−1}) / (M_{i+1} − M_i)²,
//! ```
//!
//! which is exact only on uniform grids; [`CurvatureMode::Weighted`] selects
//! the standard three-point stencil for non-uniform spacing instead.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SmileError};

/// An ordered smile: `(moneyness, implied vol)` pairs strictly ascending in
/// moneyness.
#[derive(Debug, Clone, PartialEq)]
pub struct SmileCurve {
    points: Vec<(f64, f64)>,
}

impl SmileCurve {
    /// Build a curve, validating strict moneyness ordering.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(SmileError::invalid("smile curve must not be empty"));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(SmileError::invalid(format!(
                    "moneyness must be strictly ascending, got {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        Ok(Self { points })
    }

    /// The `(moneyness, vol)` pairs.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Whether the curve is empty (never true for a constructed curve).
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.points.len() != other.points.len()
            || self
                .points
                .iter()
                .zip(&other.points)
                .any(|(a, b)| a.0 != b.0)
        {
            return Err(SmileError::invalid(
                "curves must share an identical moneyness grid",
            ));
        }
        Ok(())
    }
}

/// Which second-difference stencil [`curvature_with_mode`] applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureMode {
    /// Second difference over the squared forward spacing (default).
    #[default]
    Printed,
    /// Three-point stencil weighted for non-uniform spacing.
    Weighted,
}

impl std::str::FromStr for CurvatureMode {
    type Err = SmileError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "printed" => Ok(Self::Printed),
            "weighted" => Ok(Self::Weighted),
            other => Err(SmileError::invalid(format!(
                "unknown curvature mode '{other}' (expected printed|weighted)"
            ))),
        }
    }
}

/// Fit metrics of one model smile against one observed smile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    /// Mean squared error over the shared grid.
    pub mse: f64,
    /// Mean absolute error over the shared grid.
    pub mae: f64,
    /// Root-mean-square curvature error over interior nodes.
    pub rmsce: f64,
    /// Mean absolute curvature error over interior nodes.
    pub ace: f64,
    /// Number of grid points.
    pub n_points: usize,
    /// Number of interior (curvature) nodes, `n_points − 2`.
    pub n_interior: usize,
}

/// Mean squared error between two smiles on an identical grid.
pub fn mse(obs: &SmileCurve, model: &SmileCurve) -> Result<f64> {
    obs.check_same_grid(model)?;
    let n = obs.len() as f64;
    Ok(obs
        .points
        .iter()
        .zip(&model.points)
        .map(|(a, b)| (b.1 - a.1) * (b.1 - a.1))
        .sum::<f64>()
        / n)
}

/// Mean absolute error between two smiles on an identical grid.
pub fn mae(obs: &SmileCurve, model: &SmileCurve) -> Result<f64> {
    obs.check_same_grid(model)?;
    let n = obs.len() as f64;
    Ok(obs
        .points
        .iter()
        .zip(&model.points)
        .map(|(a, b)| (b.1 - a.1).abs())
        .sum::<f64>()
        / n)
}

/// Discrete curvature at the interior nodes with the default stencil.
pub fn curvature(curve: &SmileCurve) -> Result<Vec<(f64, f64)>> {
    curvature_with_mode(curve, CurvatureMode::Printed)
}

/// Discrete curvature at the interior nodes with an explicit stencil.
pub fn curvature_with_mode(curve: &SmileCurve, mode: CurvatureMode) -> Result<Vec<(f64, f64)>> {
    let pts = &curve.points;
    if pts.len() < 3 {
        return Err(SmileError::invalid(format!(
            "curvature needs at least 3 points, got {}",
            pts.len()
        )));
    }
    let mut out = Vec::with_capacity(pts.len() - 2);
    for i in 1..pts.len() - 1 {
        let (m_prev, s_prev) = pts[i - 1];
        let (m_mid, s_mid) = pts[i];
        let (m_next, s_next) = pts[i + 1];
        let c = match mode {
            CurvatureMode::Printed => {
                let h_fwd = m_next - m_mid;
                (s_next - 2.0 * s_mid + s_prev) / (h_fwd * h_fwd)
            }
            CurvatureMode::Weighted => {
                let h_back = m_mid - m_prev;
                let h_fwd = m_next - m_mid;
                2.0 * (s_prev / (h_back * (h_back + h_fwd)) - s_mid / (h_back * h_fwd)
                    + s_next / (h_fwd * (h_back + h_fwd)))
            }
        };
        out.push((m_mid, c));
    }
    Ok(out)
}

fn check_curvature_grids(obs: &[(f64, f64)], model: &[(f64, f64)]) -> Result<()> {
    if obs.len() != model.len() || obs.iter().zip(model).any(|(a, b)| a.0 != b.0) {
        return Err(SmileError::invalid(
            "curvature lists must share an identical interior grid",
        ));
    }
    if obs.is_empty() {
        return Err(SmileError::invalid("curvature lists must not be empty"));
    }
    Ok(())
}

/// Mean absolute curvature error over matching interior grids.
pub fn ace(obs_curv: &[(f64, f64)], model_curv: &[(f64, f64)]) -> Result<f64> {
    check_curvature_grids(obs_curv, model_curv)?;
    let n = obs_curv.len() as f64;
    Ok(obs_curv
        .iter()
        .zip(model_curv)
        .map(|(a, b)| (b.1 - a.1).abs())
        .sum::<f64>()
        / n)
}

/// Root-mean-square curvature error over matching interior grids.
pub fn rmsce(obs_curv: &[(f64, f64)], model_curv: &[(f64, f64)]) -> Result<f64> {
    check_curvature_grids(obs_curv, model_curv)?;
    let n = obs_curv.len() as f64;
    Ok((obs_curv
        .iter()
        .zip(model_curv)
        .map(|(a, b)| (b.1 - a.1) * (b.1 - a.1))
        .sum::<f64>()
        / n)
        .sqrt())
}

/// Compute the full metric report for a model smile against observations.
pub fn metric_report(
    obs: &SmileCurve,
    model: &SmileCurve,
    mode: CurvatureMode,
) -> Result<MetricReport> {
    let c_obs = curvature_with_mode(obs, mode)?;
    let c_mod = curvature_with_mode(model, mode)?;
    Ok(MetricReport {
        mse: mse(obs, model)?,
        mae: mae(obs, model)?,
        rmsce: rmsce(&c_obs, &c_mod)?,
        ace: ace(&c_obs, &c_mod)?,
        n_points: obs.len(),
        n_interior: obs.len() - 2,
    })
}

/// Order statistics of one metric column: mean, sample standard deviation,
/// and linearly interpolated quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    /// Arithmetic mean.
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator; 0 for a single value).
    pub std: f64,
    /// Minimum.
    pub min: f64,
    /// 25% quantile, linear interpolation between order statistics.
    pub q25: f64,
    /// Median.
    pub median: f64,
    /// 75% quantile.
    pub q75: f64,
    /// Maximum.
    pub max: f64,
}

/// Linearly interpolated quantile of a sorted sample.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

/// Summary statistics of a sample.
pub fn summary_stats(values: &[f64]) -> Result<SummaryStats> {
    if values.is_empty() {
        return Err(SmileError::invalid("summary of an empty sample"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    Ok(SummaryStats {
        mean,
        std,
        min: sorted[0],
        q25: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.50),
        q75: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// Per-metric summaries of a batch of reports, in fixed column order
/// (MSE, MAE, RMSCE, ACE).
pub fn summarize(reports: &[MetricReport]) -> Result<Vec<(&'static str, SummaryStats)>> {
    if reports.is_empty() {
        return Err(SmileError::invalid("summarize of an empty report list"));
    }
    let column = |f: fn(&MetricReport) -> f64| reports.iter().map(f).collect::<Vec<_>>();
    Ok(vec![
        ("MSE", summary_stats(&column(|r| r.mse))?),
        ("MAE", summary_stats(&column(|r| r.mae))?),
        ("RMSCE", summary_stats(&column(|r| r.rmsce))?),
        ("ACE", summary_stats(&column(|r| r.ace))?),
    ])
}

/// Estimate the implied regularity `H` and scale `C` from per-scale
/// volatilities via the linearized self-similarity relation
/// `log σ(n) = log C − H·log n`, fit by ordinary least squares.
pub fn estimate_implied_regularity(scales: &[u32], sigmas: &[f64]) -> Result<(f64, f64)> {
    if scales.len() != sigmas.len() {
        return Err(SmileError::invalid("scales and sigmas differ in length"));
    }
    if scales.len() < 3 {
        return Err(SmileError::invalid(format!(
            "regularity regression needs at least 3 scales, got {}",
            scales.len()
        )));
    }
    let mut xs = Vec::with_capacity(scales.len());
    let mut ys = Vec::with_capacity(scales.len());
    for (&n, &s) in scales.iter().zip(sigmas) {
        if n == 0 {
            return Err(SmileError::invalid("scales must be positive"));
        }
        if !(s > 0.0) {
            return Err(SmileError::invalid(format!(
                "sigma({n}) must be positive, got {s}"
            )));
        }
        xs.push((n as f64).ln());
        ys.push(s.ln());
    }
    let n = xs.len() as f64;
    let x_mean = xs.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - x_mean) * (x - x_mean)).sum();
    if sxx == 0.0 {
        return Err(SmileError::invalid(
            "degenerate design: all scales are equal",
        ));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_mean) * (y - y_mean))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    Ok((-slope, intercept.exp()))
}
