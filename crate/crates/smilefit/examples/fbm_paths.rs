//! Simulate fractional Brownian motion by exact Cholesky factorization of
//! its covariance and verify the self-similar scaling `Var(B_t) = k²·t^(2H)`
//! from the sample.
//!
//! ```bash
//! cargo run --release --example fbm_paths
//! ```

use smilefit::baselines::fbm::FbmSampler;
use smilefit::baselines::simulate_fbm;

fn main() -> smilefit::Result<()> {
    let grid: Vec<f64> = (1..=16).map(|i| i as f64 / 16.0).collect();

    // One path per regime: anti-persistent, Brownian, persistent.
    for hurst in [0.2, 0.5, 0.8] {
        let path = simulate_fbm(&grid, hurst, 1.0, 42)?;
        let tail: Vec<String> = path
            .values
            .iter()
            .skip(12)
            .map(|v| format!("{v:+.3}"))
            .collect();
        println!("H = {hurst}: B(0.75..1.0) = [{}]", tail.join(", "));
    }

    // Sample variances against the exact law.
    println!(
        "\n{:>5} {:>8} {:>14} {:>14}",
        "H", "t", "sample var", "k^2 t^(2H)"
    );
    let n_paths = 50_000;
    for hurst in [0.3, 0.7] {
        let sampler = FbmSampler::new(&grid, hurst, 1.0)?;
        let mut rng = <rand_chacha::ChaCha12Rng as rand::SeedableRng>::seed_from_u64(7);
        let mut acc = vec![0.0; grid.len()];
        for _ in 0..n_paths {
            for (a, v) in acc.iter_mut().zip(sampler.sample_values(&mut rng)) {
                *a += v * v;
            }
        }
        for &idx in &[3usize, 7, 15] {
            let t = grid[idx];
            let est = acc[idx] / n_paths as f64;
            println!(
                "{hurst:>5} {t:>8.4} {est:>14.6} {:>14.6}",
                t.powf(2.0 * hurst)
            );
        }
    }
    Ok(())
}
