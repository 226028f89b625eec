//! Tree-structured Parzen sampling over the unit cube.
//!
//! Completed trials are split at the γ-quantile of the objective into a
//! "good" and a "bad" set. Each coordinate gets a pair of one-dimensional
//! Parzen (Gaussian kernel) densities `l(x)` and `g(x)`; candidates are drawn
//! from `l` and the one maximizing `log l(x) − log g(x)` wins. A uniform
//! prior kernel over `[0, 1]` is mixed into both densities so early, sparse
//! histories still explore.

use rand::Rng;

/// The γ split and candidate budget of the sampler.
#[derive(Debug, Clone, Copy)]
pub struct TpeConfig {
    /// Quantile separating good from bad trials.
    pub gamma: f64,
    /// Candidates drawn from the good density per proposal.
    pub candidates: usize,
}

impl Default for TpeConfig {
    fn default() -> Self {
        Self {
            gamma: 0.25,
            candidates: 24,
        }
    }
}

/// One-dimensional Parzen estimator over `[0, 1]` with a uniform prior kernel.
struct ParzenDensity {
    centers: Vec<f64>,
    bandwidth: f64,
}

impl ParzenDensity {
    fn fit(values: &[f64]) -> Self {
        let n = values.len();
        let bandwidth = if n < 2 {
            0.25
        } else {
            let mean = values.iter().sum::<f64>() / n as f64;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            (1.06 * var.sqrt() * (n as f64).powf(-0.2)).clamp(0.05, 0.5)
        };
        Self {
            centers: values.to_vec(),
            bandwidth,
        }
    }

    /// Mixture log-density: kernels plus one uniform prior pseudo-count.
    fn log_pdf(&self, x: f64) -> f64 {
        let total = self.centers.len() as f64 + 1.0;
        let mut acc = 1.0 / total; // the uniform prior component on [0, 1]
        let norm = 1.0 / (self.bandwidth * (2.0 * std::f64::consts::PI).sqrt());
        for &c in &self.centers {
            let z = (x - c) / self.bandwidth;
            acc += norm * (-0.5 * z * z).exp() / total;
        }
        acc.max(1e-300).ln()
    }

    /// Draw one point: pick a kernel (or the prior) uniformly, sample it,
    /// and keep resampling briefly if the draw leaves the unit interval.
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let n = self.centers.len();
        let idx = rng.gen_range(0..=n);
        if idx == n {
            return rng.gen::<f64>();
        }
        let center = self.centers[idx];
        for _ in 0..16 {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
            let x = center + self.bandwidth * z;
            if (0.0..=1.0).contains(&x) {
                return x;
            }
        }
        center.clamp(0.0, 1.0)
    }
}

/// Propose the next point (unit coordinates) given the unit-space history.
///
/// `history` is `(point, objective)` per completed trial. Coordinates are
/// sampled independently, each from its own good/bad density pair.
pub fn propose<R: Rng + ?Sized>(
    history: &[(Vec<f64>, f64)],
    dim: usize,
    cfg: &TpeConfig,
    rng: &mut R,
) -> Vec<f64> {
    debug_assert!(!history.is_empty());
    let mut order: Vec<usize> = (0..history.len()).collect();
    order.sort_by(|&a, &b| history[a].1.total_cmp(&history[b].1));
    let n_good = ((history.len() as f64 * cfg.gamma).ceil() as usize)
        .clamp(1, history.len().saturating_sub(1).max(1));

    let mut point = Vec::with_capacity(dim);
    for d in 0..dim {
        let good: Vec<f64> = order[..n_good].iter().map(|&i| history[i].0[d]).collect();
        let bad: Vec<f64> = order[n_good..].iter().map(|&i| history[i].0[d]).collect();
        let l = ParzenDensity::fit(&good);
        let g = ParzenDensity::fit(&bad);
        let mut best = f64::NEG_INFINITY;
        let mut best_x = 0.5;
        for _ in 0..cfg.candidates {
            let x = l.sample(rng);
            let score = l.log_pdf(x) - g.log_pdf(x);
            if score > best {
                best = score;
                best_x = x;
            }
        }
        point.push(best_x);
    }
    point
}
