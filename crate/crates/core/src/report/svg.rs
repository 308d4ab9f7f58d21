use std::fmt::Write;

use crate::experiments::TrajectoryDiagnostic;

const W: f64 = 640.0;
const H: f64 = 400.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// SVG 1.1 line chart of a trajectory against `log₂ n`, with the reference
/// limit (if any) as a dashed horizontal line. The timestamp goes into a
/// leading comment and nowhere else.
pub fn trajectory_svg(title: &str, d: &TrajectoryDiagnostic, timestamp: &str) -> String {
    let xs: Vec<f64> = d.n_grid.iter().map(|&n| (n.max(1) as f64).log2()).collect();
    let finite = d.m_values.iter().copied().filter(|v| v.is_finite());
    let (mut lo, mut hi) = finite
        .chain(d.reference)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (lo, hi) = (0.0, 1.0);
    }
    let pad = ((hi - lo) * 0.1).max(1e-3 * hi.abs().max(1.0));
    let (lo, hi) = (lo - pad, hi + pad);
    let (x0, x1) = (xs[0], xs[xs.len() - 1].max(xs[0] + 1.0));
    let px = |x: f64| LEFT + (x - x0) / (x1 - x0) * (W - LEFT - RIGHT);
    let py = |y: f64| TOP + (hi - y) / (hi - lo) * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(s, "<!-- generated {timestamp} -->");
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" font-family="sans-serif" font-size="14" text-anchor="middle">{}</text>"#,
        W / 2.0,
        escape(title)
    );
    // Axes.
    let (ax0, ay0, ax1, ay1) = (LEFT, H - BOTTOM, W - RIGHT, TOP);
    let _ = writeln!(
        s,
        r#"<path d="M{ax0},{ay1} L{ax0},{ay0} L{ax1},{ay0}" fill="none" stroke="black" stroke-width="1"/>"#
    );
    for i in 0..=4 {
        let y = lo + (hi - lo) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="10" text-anchor="end">{:.4}</text>"#,
            LEFT - 6.0,
            py(y) + 3.0,
            y
        );
    }
    for (&n, &x) in d.n_grid.iter().zip(&xs) {
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{}" font-family="sans-serif" font-size="10" text-anchor="middle">{n}</text>"#,
            px(x),
            H - BOTTOM + 14.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">n (log scale)</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        H - 12.0
    );
    if let Some(r) = d.reference {
        let _ = writeln!(
            s,
            r#"<line x1="{ax0}" y1="{y:.2}" x2="{ax1}" y2="{y:.2}" stroke="firebrick" stroke-dasharray="6,4"/>"#,
            y = py(r)
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{:.1}" font-family="sans-serif" font-size="10" fill="firebrick" text-anchor="end">limit {r:.6}</text>"#,
            ax1,
            py(r) - 4.0
        );
    }
    let points: Vec<String> = xs
        .iter()
        .zip(&d.m_values)
        .filter(|(_, v)| v.is_finite())
        .map(|(&x, &v)| format!("{:.2},{:.2}", px(x), py(v)))
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="steelblue" stroke-width="1.5"/>"#,
        points.join(" ")
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="steelblue">{}</text>"#,
        LEFT + 8.0,
        TOP + 12.0,
        escape(&d.label)
    );
    s.push_str("</svg>\n");
    s
}
