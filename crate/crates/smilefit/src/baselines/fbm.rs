//! Exact fractional Brownian motion on a fixed grid.
//!
//! Paths are drawn from the Gaussian law with covariance
//!
//! ```text
//! E[B_t B_s] = k²/2 · (|t|^{2H} + |s|^{2H} − |t − s|^{2H}),   k² = Var[B₁],
//! ```
//!
//! by Cholesky factorization of the covariance matrix over the positive grid
//! times. Exactness makes the covariance tests sharp; at desk-scale grids
//! (≤ 4096 points) the O(n³) factorization is affordable and is done once per
//! sampler, not per path.

use rand::Rng;

use crate::error::{Result, SmileError};
use crate::rng;

/// Hard cap on the grid size for the dense factorization.
pub const MAX_GRID: usize = 4096;

/// A sampled fBm path on a fixed grid, starting at `B(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmPath {
    /// Grid times in years, ascending, starting at 0.
    pub times: Vec<f64>,
    /// Path values at the grid times; `values[0] = 0`.
    pub values: Vec<f64>,
    /// Hurst exponent of the law.
    pub hurst: f64,
    /// Scale `k` with `k² = Var[B₁]`.
    pub scale: f64,
}

/// Reusable sampler: covariance factorized once, then O(n²) per path.
#[derive(Debug, Clone)]
pub struct FbmSampler {
    times: Vec<f64>,  // strictly positive grid times
    factor: Vec<f64>, // lower-triangular Cholesky factor, row-major n x n
    hurst: f64,
    scale: f64,
}

/// Exact fBm covariance at two non-negative times.
pub fn fbm_covariance(t: f64, s: f64, hurst: f64, scale: f64) -> f64 {
    let two_h = 2.0 * hurst;
    0.5 * scale * scale * (t.abs().powf(two_h) + s.abs().powf(two_h) - (t - s).abs().powf(two_h))
}

/// Row-major lower Cholesky factor of a symmetric matrix, retrying with
/// escalating diagonal jitter when the matrix is only semidefinite. Fails
/// once jitter reaches `1e-6` of the largest diagonal entry.
pub(crate) fn cholesky_lower(matrix: &[f64], n: usize) -> Result<Vec<f64>> {
    debug_assert_eq!(matrix.len(), n * n);
    let max_diag = (0..n)
        .map(|i| matrix[i * n + i])
        .fold(0.0_f64, |a, b| a.max(b.abs()))
        .max(1e-300);

    let mut jitter = 0.0;
    loop {
        match try_cholesky(matrix, n, jitter) {
            Some(l) => {
                if jitter > 0.0 {
                    log::debug!("cholesky succeeded with diagonal jitter {jitter:.3e}");
                }
                return Ok(l);
            }
            None => {
                jitter = if jitter == 0.0 {
                    1e-12 * max_diag
                } else {
                    jitter * 100.0
                };
                if jitter > 1e-6 * max_diag {
                    return Err(SmileError::Numerical {
                        message: format!(
                            "covariance matrix not positive definite after jitter (n = {n})"
                        ),
                    });
                }
            }
        }
    }
}

fn try_cholesky(matrix: &[f64], n: usize, jitter: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = matrix[j * n + j] + jitter;
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let ljj = d.sqrt();
        l[j * n + j] = ljj;
        for i in j + 1..n {
            let mut v = matrix[i * n + j];
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = v / ljj;
        }
    }
    Some(l)
}

/// Multiply the lower-triangular factor by a standard normal vector.
pub(crate) fn lower_tri_matvec(l: &[f64], n: usize, z: &[f64], out: &mut [f64]) {
    for i in 0..n {
        let row = &l[i * n..i * n + i + 1];
        let mut acc = 0.0;
        for (k, lik) in row.iter().enumerate() {
            acc += lik * z[k];
        }
        out[i] = acc;
    }
}

impl FbmSampler {
    /// Build a sampler for the given grid. The grid must be strictly
    /// ascending with at most one leading zero; at most [`MAX_GRID`] points.
    pub fn new(grid: &[f64], hurst: f64, scale: f64) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(SmileError::invalid(format!(
                "hurst must lie in (0, 1), got {hurst}"
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(SmileError::invalid(format!(
                "scale must be positive, got {scale}"
            )));
        }
        if grid.is_empty() {
            return Err(SmileError::invalid("grid must not be empty"));
        }
        if grid.len() > MAX_GRID {
            return Err(SmileError::invalid(format!(
                "grid of {} points exceeds the dense-factorization cap {MAX_GRID}",
                grid.len()
            )));
        }
        for w in grid.windows(2) {
            if !(w[1] > w[0]) {
                return Err(SmileError::invalid("grid must be strictly ascending"));
            }
        }
        let times: Vec<f64> = grid.iter().copied().filter(|&t| t != 0.0).collect();
        if times.first().is_some_and(|&t| t < 0.0) {
            return Err(SmileError::invalid("grid times must be non-negative"));
        }
        if times.is_empty() {
            return Err(SmileError::invalid("grid needs at least one positive time"));
        }

        let n = times.len();
        let mut cov = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let c = fbm_covariance(times[i], times[j], hurst, scale);
                cov[i * n + j] = c;
                cov[j * n + i] = c;
            }
        }
        let factor = cholesky_lower(&cov, n)?;
        Ok(Self {
            times,
            factor,
            hurst,
            scale,
        })
    }

    /// Positive grid times the sampler draws at.
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    /// Draw one path (values at the positive grid times).
    pub fn sample_values<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let n = self.times.len();
        let z: Vec<f64> = (0..n).map(|_| rng::standard_normal(rng)).collect();
        let mut out = vec![0.0; n];
        lower_tri_matvec(&self.factor, n, &z, &mut out);
        out
    }

    /// Draw one full path including the `B(0) = 0` anchor.
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> FbmPath {
        let mut times = Vec::with_capacity(self.times.len() + 1);
        times.push(0.0);
        times.extend_from_slice(&self.times);
        let mut values = Vec::with_capacity(times.len());
        values.push(0.0);
        values.extend(self.sample_values(rng));
        FbmPath {
            times,
            values,
            hurst: self.hurst,
            scale: self.scale,
        }
    }
}

/// Simulate one fBm path on `grid` with Hurst exponent `hurst` and scale `k`,
/// deterministically from `seed`.
pub fn simulate_fbm(grid: &[f64], hurst: f64, k: f64, seed: u64) -> Result<FbmPath> {
    let sampler = FbmSampler::new(grid, hurst, k)?;
    let mut rng = rng::block_rng(seed, 0);
    Ok(sampler.sample_path(&mut rng))
}
