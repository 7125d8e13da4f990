//! Minimal SVG scatter plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 60.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub struct Series {
    pub label: String,
    /// (instance position, value)
    pub points: Vec<(usize, f64)>,
    /// Best value per instance position, drawn filled.
    pub best: Vec<(usize, f64)>,
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders a scatter plot over `n` instance positions. All coordinates are
/// printed with two decimals, so equal inputs give equal bytes.
pub fn scatter(title: &str, n: usize, series: &[Series]) -> String {
    let max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold(0.0f64, f64::max);
    let y_max = nice_ceiling(max.max(1.0));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let slot = plot_w / n.max(1) as f64;
    let x_of = |i: usize, s: usize| {
        let spread = slot * 0.5;
        let off = if series.len() > 1 { spread * (s as f64 / (series.len() - 1) as f64 - 0.5) } else { 0.0 };
        LEFT + slot * (i as f64 + 0.5) + off
    };
    let y_of = |v: f64| TOP + plot_h * (1.0 - v / y_max);

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="14">{}</text>"#, LEFT + plot_w / 2.0, esc(title));
    // Axes and horizontal grid.
    for tick in 0..=5 {
        let v = y_max * tick as f64 / 5.0;
        let y = y_of(v);
        let _ = writeln!(out, r##"<line x1="{LEFT:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/>"##, LEFT + plot_w);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#, LEFT - 6.0, y + 4.0, trim(v));
    }
    let _ = writeln!(
        out,
        r##"<line x1="{LEFT:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#000000"/>"##,
        TOP + plot_h,
        LEFT + plot_w,
        TOP + plot_h
    );
    let _ = writeln!(out, r##"<line x1="{LEFT:.2}" y1="{TOP:.2}" x2="{LEFT:.2}" y2="{:.2}" stroke="#000000"/>"##, TOP + plot_h);
    let step = (n / 10).max(1);
    for i in (0..n).step_by(step) {
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#, x_of(i, 0).max(LEFT), TOP + plot_h + 16.0, i + 1);
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">instance (ordered by QCBO size)</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">gap [%]</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    for (s, ser) in series.iter().enumerate() {
        let color = PALETTE[s % PALETTE.len()];
        let _ = writeln!(out, r#"<g fill="none" stroke="{color}">"#);
        for &(i, v) in &ser.points {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3"/>"#, x_of(i, s), y_of(v));
        }
        let _ = writeln!(out, "</g>");
        let _ = writeln!(out, r#"<g fill="{color}" stroke="{color}">"#);
        for &(i, v) in &ser.best {
            let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="4.5"/>"#, x_of(i, s), y_of(v));
        }
        let _ = writeln!(out, "</g>");
        let ly = TOP + 10.0 + 20.0 * s as f64;
        let lx = WIDTH - RIGHT + 16.0;
        let _ = writeln!(out, r#"<circle cx="{lx:.2}" cy="{ly:.2}" r="4.5" fill="{color}" stroke="{color}"/>"#);
        let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">{}</text>"#, lx + 10.0, ly + 4.0, esc(&ser.label));
    }
    let ly = TOP + 10.0 + 20.0 * series.len() as f64;
    let lx = WIDTH - RIGHT + 16.0;
    let _ = writeln!(out, r##"<circle cx="{lx:.2}" cy="{ly:.2}" r="3" fill="none" stroke="#555555"/>"##);
    let _ = writeln!(out, r#"<text x="{:.2}" y="{:.2}">run (filled: best)</text>"#, lx + 10.0, ly + 4.0);
    out.push_str("</svg>\n");
    out
}

/// Smallest value of the form {1, 2, 5}·10^k at or above `v`.
fn nice_ceiling(v: f64) -> f64 {
    let mag = 10f64.powf(v.log10().floor());
    [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|&c| c >= v).unwrap_or(10.0 * mag)
}

fn trim(v: f64) -> String {
    let s = format!("{v:.2}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceilings() {
        assert_eq!(nice_ceiling(1.0), 1.0);
        assert_eq!(nice_ceiling(3.2), 5.0);
        assert_eq!(nice_ceiling(57.0), 100.0);
        assert_eq!(trim(2.50), "2.5");
        assert_eq!(trim(20.0), "20");
    }

    #[test]
    fn well_formed_and_deterministic() {
        let s = [Series { label: "a<b".into(), points: vec![(0, 0.0), (1, 12.5)], best: vec![(0, 0.0)] }];
        let svg = scatter("t", 2, &s);
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert!(svg.contains("a&lt;b"));
        assert_eq!(svg, scatter("t", 2, &s));
    }
}
