//! Minimal SVG line plots of dispersion curves.

use std::fmt::Write as _;
use std::path::Path;

use crate::dispersion::DispersionCurve;
use crate::error::{Error, Result};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 440.0;
const MARGIN: f64 = 60.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One polyline per branch, axes in units of `omega0`, branch names as
/// legend text.
pub fn render_svg(curve: &DispersionCurve, title: &str) -> Result<String> {
    let branches = curve.branches();
    let finite: Vec<_> = curve.samples.iter().filter(|s| s.omega.is_finite()).collect();
    if finite.is_empty() || branches.is_empty() {
        return Err(Error::NoData);
    }
    let (mut x0, mut x1) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y1: f64 = 0.0;
    for s in &finite {
        x0 = x0.min(s.param);
        x1 = x1.max(s.param);
        y1 = y1.max(s.omega);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= 0.0 {
        y1 = 1.0;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - y / (1.05 * y1) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
    let (bx, by) = (MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        svg,
        r#"<path d="M{bx} {} L{bx} {by} L{} {by}" stroke="black" fill="none"/>"#,
        MARGIN,
        WIDTH - MARGIN
    );
    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let y = 1.05 * y1 * i as f64 / 4.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle" font-size="11">{x:.3}</text>"#,
            px(x),
            by + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end" font-size="11">{y:.3}</text>"#,
            bx - 6.0,
            py(y) + 4.0
        );
    }
    let xlabel = match curve.axis.name() {
        "eta" => "coupling eta".to_string(),
        other => format!("{other} / omega0"),
    };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="13">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 18.0,
        escape(&xlabel)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{}" text-anchor="middle" font-size="13" transform="rotate(-90 16 {})">Omega / omega0</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    for (i, branch) in branches.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let points: Vec<String> = curve
            .branch(*branch)
            .iter()
            .filter(|s| s.omega.is_finite())
            .map(|s| format!("{:.2},{:.2}", px(s.param), py(s.omega)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="branch" data-branch="{branch}" points="{}" stroke="{color}" stroke-width="1.6" fill="none"/>"#,
            points.join(" ")
        );
        let ly = MARGIN + 16.0 * i as f64;
        let lx = WIDTH - MARGIN - 80.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            lx + 18.0
        );
        let _ = writeln!(
            svg,
            r#"<text class="legend" x="{}" y="{}" font-size="12">{branch}</text>"#,
            lx + 24.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

pub fn emit_plot(curve: &DispersionCurve, title: &str, path: impl AsRef<Path>) -> Result<()> {
    let svg = render_svg(curve, title)?;
    std::fs::write(path.as_ref(), svg)?;
    Ok(())
}
