//! Minimal diagnostic plot: histogram bars, reference polyline, axis ticks.

use std::fmt::Write;

use radproj::analysis::ReferenceDensity;
use radproj::pipeline::SpacingHistogram;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 48.0;

/// Renders `h` as bars with `reference` overlaid. `comments` become XML
/// comments at the top of the file.
pub fn histogram_svg(h: &SpacingHistogram, reference: &dyn ReferenceDensity, comments: &[String]) -> String {
    let density = h.density();
    let samples = 400;
    let curve: Vec<(f64, f64)> = (0..=samples)
        .map(|i| {
            let t = h.t_min + (h.t_max - h.t_min) * i as f64 / samples as f64;
            (t, reference.pdf(t))
        })
        .collect();
    let peak = density
        .iter()
        .copied()
        .chain(curve.iter().map(|p| p.1))
        .fold(0.0f64, f64::max);
    let y_max = if peak > 0.0 { nice_ceiling(peak * 1.05) } else { 1.0 };
    let plot_w = WIDTH - 2.0 * MARGIN;
    let plot_h = HEIGHT - 2.0 * MARGIN;
    let sx = |t: f64| MARGIN + (t - h.t_min) / (h.t_max - h.t_min) * plot_w;
    let sy = |v: f64| HEIGHT - MARGIN - v.min(y_max) / y_max * plot_h;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    for c in comments {
        let _ = writeln!(s, "<!-- {} -->", c.replace("--", "- -"));
    }
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r##"<g fill="#9ab" stroke="none">"##);
    for (k, &d) in density.iter().enumerate() {
        if d <= 0.0 {
            continue;
        }
        let (x0, x1) = (sx(h.bin_left(k)), sx(h.bin_right(k)));
        let y = sy(d);
        let _ = writeln!(
            s,
            r#"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{:.2}"/>"#,
            x1 - x0,
            HEIGHT - MARGIN - y
        );
    }
    let _ = writeln!(s, "</g>");
    let pts: Vec<String> = curve.iter().map(|&(t, v)| format!("{:.2},{:.2}", sx(t), sy(v))).collect();
    let _ = writeln!(
        s,
        r##"<polyline fill="none" stroke="#c22" stroke-width="1.5" points="{}"/>"##,
        pts.join(" ")
    );
    // axes and ticks
    let (x_axis, y_axis) = (HEIGHT - MARGIN, MARGIN);
    let _ = writeln!(s, r#"<g stroke="black" stroke-width="1" font-family="sans-serif" font-size="11">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{y_axis}" y1="{x_axis}" x2="{}" y2="{x_axis}"/>"#,
        WIDTH - MARGIN
    );
    let _ = writeln!(s, r#"<line x1="{y_axis}" y1="{x_axis}" x2="{y_axis}" y2="{MARGIN}"/>"#);
    let x_step = nice_ceiling((h.t_max - h.t_min) / 8.0);
    let mut t = (h.t_min / x_step).ceil() * x_step;
    while t <= h.t_max + 1e-12 {
        let x = sx(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{x_axis}" x2="{x:.2}" y2="{}"/><text x="{x:.2}" y="{}" text-anchor="middle" stroke="none">{}</text>"#,
            x_axis + 5.0,
            x_axis + 18.0,
            trim(t)
        );
        t += x_step;
    }
    let y_step = nice_ceiling(y_max / 5.0);
    let mut v = 0.0;
    while v <= y_max + 1e-12 {
        let y = sy(v);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{y:.2}" x2="{y_axis}" y2="{y:.2}"/><text x="{}" y="{:.2}" text-anchor="end" stroke="none">{}</text>"#,
            y_axis - 5.0,
            y_axis - 8.0,
            y + 4.0,
            trim(v)
        );
        v += y_step;
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">normalised gap t (bars: data, line: {})</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0,
        reference.name()
    );
    let _ = writeln!(s, "</svg>");
    s
}

/// Smallest of 1, 2, 5 times a power of ten that is at least `x`.
fn nice_ceiling(x: f64) -> f64 {
    let p = 10f64.powf(x.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * p)
        .find(|&v| v >= x * (1.0 - 1e-12))
        .unwrap_or(10.0 * p)
}

fn trim(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
