//! Self-contained SVG of `log₁₀` distance against iteration.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 56.0;

fn polyline(points: &[(f64, f64)], map: impl Fn(f64, f64) -> (f64, f64), style: &str) -> String {
    let coords: Vec<String> = points
        .iter()
        .map(|&(x, y)| {
            let (px, py) = map(x, y);
            format!("{px:.2},{py:.2}")
        })
        .collect();
    format!("<polyline fill=\"none\" {style} points=\"{}\"/>\n", coords.join(" "))
}

/// `observed` holds `(iteration, distance)`; nonpositive distances are
/// dropped. `bound` is an optional reference curve on the same axes.
pub fn distance_svg(title: &str, observed: &[(usize, f64)], bound: Option<&[(usize, f64)]>) -> String {
    let to_log = |pts: &[(usize, f64)]| -> Vec<(f64, f64)> {
        pts.iter().filter(|(_, d)| *d > 0.0 && d.is_finite()).map(|&(k, d)| (k as f64, d.log10())).collect()
    };
    let data = to_log(observed);
    let reference = bound.map(to_log).unwrap_or_default();

    let all = data.iter().chain(reference.iter());
    let (mut x_max, mut y_min, mut y_max) = (1.0f64, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in all {
        x_max = x_max.max(x);
        y_min = y_min.min(y);
        y_max = y_max.max(y);
    }
    if !y_min.is_finite() {
        (y_min, y_max) = (-1.0, 0.0);
    }
    let y_lo = y_min.floor();
    let y_hi = y_max.ceil().max(y_lo + 1.0);
    let map = |x: f64, y: f64| {
        let px = MARGIN + (WIDTH - 2.0 * MARGIN) * x / x_max;
        let py = HEIGHT - MARGIN - (HEIGHT - 2.0 * MARGIN) * (y - y_lo) / (y_hi - y_lo);
        (px, py)
    };

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">"
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{title}</text>",
        WIDTH / 2.0
    );
    let (x0, y0) = map(0.0, y_lo);
    let (x1, y1) = map(x_max, y_hi);
    let _ =
        writeln!(s, "<path d=\"M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}\" stroke=\"black\" fill=\"none\"/>");
    let mut tick = y_lo;
    while tick <= y_hi {
        let (_, py) = map(0.0, tick);
        let _ = writeln!(
            s,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{tick}</text>",
            x0 - 6.0,
            py + 4.0
        );
        tick += ((y_hi - y_lo) / 8.0).ceil().max(1.0);
    }
    let _ = writeln!(
        s,
        "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{x_max}</text>",
        x1,
        y0 + 16.0
    );
    let _ = writeln!(s, "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">iteration</text>", WIDTH / 2.0, HEIGHT - 12.0);
    if !reference.is_empty() {
        s.push_str(&polyline(&reference, map, "stroke=\"#d62728\" stroke-dasharray=\"6 4\""));
    }
    if !data.is_empty() {
        s.push_str(&polyline(&data, map, "stroke=\"#1f77b4\" stroke-width=\"1.5\""));
    }
    s.push_str("</svg>\n");
    s
}
