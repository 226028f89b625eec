//! Discrete smile curvature and the curvature error metrics. Compares the
//! default stencil (second difference over the squared forward spacing)
//! against the weighted three-point stencil on a non-uniform grid.
//!
//! ```bash
//! cargo run --example curvature_metrics
//! ```

use smilefit::metrics::{
    ace, curvature_with_mode, metric_report, rmsce, CurvatureMode, SmileCurve,
};

fn main() -> smilefit::Result<()> {
    // A non-uniform observed smile and a slightly-off model smile.
    let observed = SmileCurve::new(vec![
        (0.70, 0.310),
        (0.85, 0.240),
        (0.97, 0.195),
        (1.00, 0.190),
        (1.18, 0.230),
        (1.45, 0.330),
    ])?;
    let model = SmileCurve::new(vec![
        (0.70, 0.305),
        (0.85, 0.246),
        (0.97, 0.193),
        (1.00, 0.192),
        (1.18, 0.225),
        (1.45, 0.338),
    ])?;

    for mode in [CurvatureMode::Printed, CurvatureMode::Weighted] {
        let c_obs = curvature_with_mode(&observed, mode)?;
        let c_mod = curvature_with_mode(&model, mode)?;
        println!("{mode:?} stencil:");
        println!("{:>8} {:>12} {:>12}", "m", "C_obs", "C_mod");
        for (o, m) in c_obs.iter().zip(&c_mod) {
            println!("{:>8.3} {:>12.4} {:>12.4}", o.0, o.1, m.1);
        }
        println!(
            "  ACE = {:.6}   RMSCE = {:.6}\n",
            ace(&c_obs, &c_mod)?,
            rmsce(&c_obs, &c_mod)?
        );
    }

    let report = metric_report(&observed, &model, CurvatureMode::Printed)?;
    println!(
        "full report: mse={:.3e} mae={:.3e} rmsce={:.4} ace={:.4} ({} points, {} interior)",
        report.mse, report.mae, report.rmsce, report.ace, report.n_points, report.n_interior
    );
    Ok(())
}
