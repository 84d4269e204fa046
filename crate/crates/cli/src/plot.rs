//! Gap-versus-epoch line plot as a standalone SVG with a logarithmic y axis.

use std::fmt::Write as _;

const W: f64 = 720.0;
const H: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 150.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0].into_iter().map(|m| m * mag).find(|&s| s >= raw).unwrap_or(10.0 * mag)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Nonpositive gaps cannot be drawn on a log axis and are skipped.
pub fn gap_plot(title: &str, curves: &[(String, Vec<(f64, f64)>)]) -> String {
    let pts = || curves.iter().flat_map(|(_, c)| c.iter()).filter(|p| p.1 > 0.0 && p.1.is_finite());
    let xmax = pts().map(|p| p.0).fold(0.0, f64::max).max(1e-9);
    let lo = pts().map(|p| p.1.log10()).fold(f64::INFINITY, f64::min);
    let hi = pts().map(|p| p.1.log10()).fold(f64::NEG_INFINITY, f64::max);
    let (ylo, yhi) = if lo.is_finite() { (lo.floor(), hi.ceil().max(lo.floor() + 1.0)) } else { (-1.0, 0.0) };
    let (pw, ph) = (W - LEFT - RIGHT, H - TOP - BOTTOM);
    let sx = |x: f64| LEFT + x / xmax * pw;
    let sy = |ly: f64| TOP + (yhi - ly) / (yhi - ylo) * ph;

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#).unwrap();
    writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + pw / 2.0, escape(title)).unwrap();

    let mut d = ylo;
    while d <= yhi + 1e-9 {
        let y = sy(d);
        writeln!(s, r##"<line x1="{LEFT}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#ddd"/>"##, LEFT + pw).unwrap();
        writeln!(s, r#"<text x="{}" y="{:.1}" text-anchor="end">1e{}</text>"#, LEFT - 6.0, y + 4.0, d as i64).unwrap();
        d += 1.0;
    }
    let step = nice_step(xmax);
    let mut x = 0.0;
    while x <= xmax * (1.0 + 1e-9) {
        let px = sx(x);
        writeln!(s, r##"<line x1="{px:.1}" y1="{:.1}" x2="{px:.1}" y2="{:.1}" stroke="#333"/>"##, TOP + ph, TOP + ph + 5.0).unwrap();
        writeln!(s, r#"<text x="{px:.1}" y="{:.1}" text-anchor="middle">{x}</text>"#, TOP + ph + 18.0).unwrap();
        x += step;
    }
    writeln!(s, r##"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333"/>"##).unwrap();
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">epoch</text>"#, LEFT + pw / 2.0, H - 10.0).unwrap();
    writeln!(s, r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">gap</text>"#, TOP + ph / 2.0, TOP + ph / 2.0).unwrap();

    for (i, (name, c)) in curves.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let line: Vec<String> = c
            .iter()
            .filter(|p| p.1 > 0.0 && p.1.is_finite())
            .map(|&(e, g)| format!("{:.2},{:.2}", sx(e), sy(g.log10())))
            .collect();
        if !line.is_empty() {
            writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#, line.join(" ")).unwrap();
        }
        let ly = TOP + 16.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 14.0;
        writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#, lx + 24.0).unwrap();
        writeln!(s, r#"<text x="{}" y="{}">{}</text>"#, lx + 30.0, ly + 4.0, escape(name)).unwrap();
    }
    s.push_str("</svg>\n");
    s
}
