//! Minimal SVG line and bar charts.

use std::fmt::Write as _;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn bounds<'a>(values: impl Iterator<Item = &'a f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(title: &str, lo: f64, hi: f64) -> String {
    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#, WIDTH / 2.0, escape(title)).unwrap();
    let (x0, y0, y1) = (MARGIN, HEIGHT - MARGIN, MARGIN);
    writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{}" y2="{y0}" stroke="black"/>"#, WIDTH - MARGIN).unwrap();
    writeln!(s, r#"<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{lo:.3}</text>"#, x0 - 4.0, y0).unwrap();
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{hi:.3}</text>"#, x0 - 4.0, y1 + 4.0).unwrap();
    s
}

fn legend(s: &mut String, names: &[&str]) {
    for (i, name) in names.iter().enumerate() {
        let y = MARGIN + 16.0 * i as f64;
        let c = COLORS[i % COLORS.len()];
        writeln!(s, r#"<rect x="{}" y="{}" width="10" height="10" fill="{c}"/>"#, WIDTH - 150.0, y - 9.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{y}">{}</text>"#, WIDTH - 135.0, escape(name)).unwrap();
    }
}

/// One polyline per series over shared x values.
pub fn line_chart(title: &str, xs: &[f64], series: &[(&str, Vec<f64>)]) -> String {
    let (lo, hi) = bounds(series.iter().flat_map(|(_, v)| v.iter()));
    let (xlo, xhi) = bounds(xs.iter());
    let mut s = header(title, lo, hi);
    let px = |x: f64| MARGIN + (x - xlo) / (xhi - xlo) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);
    for (i, (_, values)) in series.iter().enumerate() {
        let points: Vec<String> = xs
            .iter()
            .zip(values)
            .filter(|(_, y)| y.is_finite())
            .map(|(&x, &y)| format!("{:.1},{:.1}", px(x), py(y)))
            .collect();
        writeln!(
            s,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[i % COLORS.len()],
            points.join(" ")
        )
        .unwrap();
    }
    legend(&mut s, &series.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}

/// Grouped bars: one group per index, one bar per series.
pub fn bar_chart(title: &str, series: &[(&str, Vec<f64>)]) -> String {
    let (lo, hi) = bounds(series.iter().flat_map(|(_, v)| v.iter()).chain([0.0].iter()));
    let mut s = header(title, lo, hi);
    let groups = series.iter().map(|(_, v)| v.len()).max().unwrap_or(0).max(1);
    let group_w = (WIDTH - 2.0 * MARGIN) / groups as f64;
    let bar_w = group_w * 0.8 / series.len().max(1) as f64;
    let py = |y: f64| HEIGHT - MARGIN - (y - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);
    for (i, (_, values)) in series.iter().enumerate() {
        for (g, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                continue;
            }
            let x = MARGIN + g as f64 * group_w + group_w * 0.1 + i as f64 * bar_w;
            let (top, bottom) = (py(v.max(0.0)), py(v.min(0.0)));
            writeln!(
                s,
                r#"<rect x="{x:.1}" y="{top:.1}" width="{bar_w:.1}" height="{:.1}" fill="{}"/>"#,
                bottom - top,
                COLORS[i % COLORS.len()]
            )
            .unwrap();
        }
    }
    for g in 0..groups {
        let x = MARGIN + (g as f64 + 0.5) * group_w;
        writeln!(s, r#"<text x="{x:.1}" y="{}" text-anchor="middle">pixel {g}</text>"#, HEIGHT - MARGIN + 16.0).unwrap();
    }
    legend(&mut s, &series.iter().map(|(n, _)| *n).collect::<Vec<_>>());
    s.push_str("</svg>\n");
    s
}
