//! Bounded Nelder-Mead simplex minimization.
//!
//! Standard reflection/expansion/contraction/shrink moves with every trial
//! point clamped into the box. The returned point is the best simplex vertex,
//! so the result is never worse than the starting point.

/// Outcome of a bounded simplex run.
#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective at the best point.
    pub fval: f64,
    /// Iterations performed.
    pub iterations: usize,
    /// Objective evaluations performed.
    pub evals: usize,
}

const ALPHA: f64 = 1.0; // reflection
const GAMMA: f64 = 2.0; // expansion
const RHO: f64 = 0.5; // contraction
const SIGMA: f64 = 0.5; // shrink

fn clamp_into(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((xi, &l), &h) in x.iter_mut().zip(lo).zip(hi) {
        *xi = xi.clamp(l, h);
    }
}

/// Minimize `f` over the box `[lo, hi]` starting from `x0`.
///
/// `step` sets the initial simplex edge relative to the box width in each
/// coordinate; edges that would leave the box are flipped inward.
pub fn minimize_bounded<F>(
    mut f: F,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    step: f64,
    max_iter: usize,
    tol: f64,
) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert!(dim > 0 && lo.len() == dim && hi.len() == dim);
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut start = x0.to_vec();
    clamp_into(&mut start, lo, hi);
    simplex.push(start.clone());
    for i in 0..dim {
        let mut v = start.clone();
        let width = hi[i] - lo[i];
        let mut delta = step * width;
        if v[i] + delta > hi[i] {
            delta = -delta;
        }
        v[i] += delta;
        clamp_into(&mut v, lo, hi);
        simplex.push(v);
    }
    let mut scores: Vec<f64> = simplex.iter().map(|v| eval(v, &mut evals)).collect();

    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        // Converged when both the score spread and the simplex extent shrink.
        let spread = scores[worst] - scores[best];
        let extent = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        if spread.abs() < tol && extent < tol {
            break;
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for &idx in order.iter().take(dim) {
            for (c, v) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += v;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let blend = |a: &[f64], b: &[f64], w: f64| -> Vec<f64> {
            let mut x: Vec<f64> = a.iter().zip(b).map(|(ai, bi)| ai + w * (ai - bi)).collect();
            clamp_into(&mut x, lo, hi);
            x
        };

        let reflected = blend(&centroid, &simplex[worst], ALPHA);
        let f_reflected = eval(&reflected, &mut evals);

        if f_reflected < scores[best] {
            let expanded = blend(&centroid, &simplex[worst], GAMMA);
            let f_expanded = eval(&expanded, &mut evals);
            if f_expanded < f_reflected {
                simplex[worst] = expanded;
                scores[worst] = f_expanded;
            } else {
                simplex[worst] = reflected;
                scores[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < scores[second_worst] {
            simplex[worst] = reflected;
            scores[worst] = f_reflected;
            continue;
        }

        let contracted = blend(&centroid, &simplex[worst], -RHO);
        let f_contracted = eval(&contracted, &mut evals);
        if f_contracted < scores[worst] {
            simplex[worst] = contracted;
            scores[worst] = f_contracted;
            continue;
        }

        // Shrink toward the best vertex.
        let best_point = simplex[best].clone();
        for idx in 0..=dim {
            if idx == best {
                continue;
            }
            let mut v: Vec<f64> = simplex[idx]
                .iter()
                .zip(&best_point)
                .map(|(x, b)| b + SIGMA * (x - b))
                .collect();
            clamp_into(&mut v, lo, hi);
            scores[idx] = eval(&v, &mut evals);
            simplex[idx] = v;
        }
    }

    let best = scores
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap();
    NelderMeadResult {
        x: simplex[best].clone(),
        fval: scores[best],
        iterations,
        evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_shifted_quadratic() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 2.0 * (x[1] - 0.7).powi(2);
        let r = minimize_bounded(f, &[0.9, 0.1], &[0.0, 0.0], &[1.0, 1.0], 0.1, 500, 1e-12);
        assert!((r.x[0] - 0.3).abs() < 1e-5, "{:?}", r.x);
        assert!((r.x[1] - 0.7).abs() < 1e-5, "{:?}", r.x);
        assert!(r.fval < 1e-9);
    }

    #[test]
    fn respects_bounds_when_minimum_is_outside() {
        // Unconstrained minimum at (2, 2); box caps at 1.
        let f = |x: &[f64]| (x[0] - 2.0).powi(2) + (x[1] - 2.0).powi(2);
        let r = minimize_bounded(f, &[0.5, 0.5], &[0.0, 0.0], &[1.0, 1.0], 0.1, 500, 1e-12);
        assert!(r.x.iter().all(|&v| (0.0..=1.0).contains(&v)));
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6);
    }

    #[test]
    fn never_worse_than_start() {
        let rosenbrock = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let start = [0.2, 0.8];
        let f_start = rosenbrock(&start);
        let r = minimize_bounded(
            rosenbrock,
            &start,
            &[0.0, 0.0],
            &[2.0, 2.0],
            0.05,
            50,
            1e-12,
        );
        assert!(r.fval <= f_start);
    }

    #[test]
    fn handles_nan_objective_as_infinite() {
        let f = |x: &[f64]| {
            if x[0] < 0.2 {
                f64::NAN
            } else {
                (x[0] - 0.5).powi(2)
            }
        };
        let r = minimize_bounded(f, &[0.9], &[0.0], &[1.0], 0.2, 200, 1e-12);
        assert!((r.x[0] - 0.5).abs() < 1e-5);
    }
}
