//! Minimal deterministic SVG rendering of smile fits: observed points plus
//! one polyline per model curve, axes labeled moneyness / implied vol.
//! Coordinates are formatted with fixed precision so identical inputs give
//! byte-identical files.

/// A smile-fit figure: observations and named model curves.
#[derive(Debug, Clone, Default)]
pub struct SmilePlot {
    /// Figure title (typically the ticker).
    pub title: String,
    /// Observed `(moneyness, vol)` points.
    pub observed: Vec<(f64, f64)>,
    /// Model curves as `(name, points)`.
    pub curves: Vec<(String, Vec<(f64, f64)>)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN_L: f64 = 64.0;
const MARGIN_R: f64 = 24.0;
const MARGIN_T: f64 = 36.0;
const MARGIN_B: f64 = 52.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn ticks(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Render the figure to an SVG string.
pub fn render_svg(plot: &SmilePlot) -> String {
    let all_points = plot
        .observed
        .iter()
        .chain(plot.curves.iter().flat_map(|(_, pts)| pts.iter()));
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all_points {
        x_lo = x_lo.min(x);
        x_hi = x_hi.max(x);
        y_lo = y_lo.min(y);
        y_hi = y_hi.max(y);
    }
    if !x_lo.is_finite() {
        (x_lo, x_hi, y_lo, y_hi) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_hi - x_lo < 1e-12 {
        x_hi = x_lo + 1.0;
    }
    if y_hi - y_lo < 1e-12 {
        y_hi = y_lo + 1.0;
    }
    let y_pad = 0.05 * (y_hi - y_lo);
    y_lo -= y_pad;
    y_hi += y_pad;

    let px = |x: f64| MARGIN_L + (x - x_lo) / (x_hi - x_lo) * (WIDTH - MARGIN_L - MARGIN_R);
    let py =
        |y: f64| HEIGHT - MARGIN_B - (y - y_lo) / (y_hi - y_lo) * (HEIGHT - MARGIN_T - MARGIN_B);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        plot.title
    ));

    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        MARGIN_L,
        HEIGHT - MARGIN_B,
        WIDTH - MARGIN_R,
        HEIGHT - MARGIN_B
    ));
    svg.push_str(&format!(
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        MARGIN_L,
        MARGIN_T,
        MARGIN_L,
        HEIGHT - MARGIN_B
    ));
    for t in ticks(x_lo, x_hi, 5) {
        svg.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{0:.2}\" y2=\"{2:.2}\" stroke=\"black\"/>\n\
             <text x=\"{0:.2}\" y=\"{3:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{4:.3}</text>\n",
            px(t),
            HEIGHT - MARGIN_B,
            HEIGHT - MARGIN_B + 5.0,
            HEIGHT - MARGIN_B + 20.0,
            t
        ));
    }
    for t in ticks(y_lo, y_hi, 5) {
        svg.push_str(&format!(
            "<line x1=\"{1:.2}\" y1=\"{0:.2}\" x2=\"{2:.2}\" y2=\"{0:.2}\" stroke=\"black\"/>\n\
             <text x=\"{3:.2}\" y=\"{4:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{5:.3}</text>\n",
            py(t),
            MARGIN_L - 5.0,
            MARGIN_L,
            MARGIN_L - 8.0,
            py(t) + 4.0,
            t
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">moneyness</text>\n",
        MARGIN_L + (WIDTH - MARGIN_L - MARGIN_R) / 2.0,
        HEIGHT - 12.0
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.2})\">implied vol</text>\n",
        MARGIN_T + (HEIGHT - MARGIN_T - MARGIN_B) / 2.0
    ));

    // Model curves.
    for (i, (name, pts)) in plot.curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
        let ly = MARGIN_T + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{0:.2}\" y1=\"{1:.2}\" x2=\"{2:.2}\" y2=\"{1:.2}\" stroke=\"{color}\" \
             stroke-width=\"1.5\"/>\n\
             <text x=\"{3:.2}\" y=\"{4:.2}\" font-family=\"sans-serif\" font-size=\"11\">{name}</text>\n",
            WIDTH - MARGIN_R - 120.0,
            ly,
            WIDTH - MARGIN_R - 96.0,
            WIDTH - MARGIN_R - 90.0,
            ly + 4.0
        ));
    }

    // Observed points on top.
    for &(x, y) in &plot.observed {
        svg.push_str(&format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"black\"/>\n",
            px(x),
            py(y)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_plot() -> SmilePlot {
        SmilePlot {
            title: "TEST".into(),
            observed: vec![(0.9, 0.22), (1.0, 0.18), (1.1, 0.21)],
            curves: vec![
                ("AdS".into(), vec![(0.9, 0.215), (1.0, 0.181), (1.1, 0.208)]),
                ("SABR".into(), vec![(0.9, 0.21), (1.0, 0.185), (1.1, 0.205)]),
            ],
        }
    }

    #[test]
    fn renders_curves_points_and_labels() {
        let svg = render_svg(&sample_plot());
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("moneyness"));
        assert!(svg.contains("implied vol"));
        assert!(svg.contains(">AdS<"));
        assert!(svg.contains(">SABR<"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn rendering_is_deterministic() {
        assert_eq!(render_svg(&sample_plot()), render_svg(&sample_plot()));
    }

    #[test]
    fn empty_plot_still_renders() {
        let svg = render_svg(&SmilePlot::default());
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
    }
}
