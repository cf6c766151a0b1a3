//! Static SVG plots.
//!
//! Snapshot plots draw shape points in light gray and robots as discs colored
//! by their squared distance to the shape, `mu`. The ramp runs from blue
//! (`mu = 0`) through pale yellow to red at the snapshot's largest `mu`,
//! interpolating linearly in `mu / max mu` between the stops `#2c7bb6`,
//! `#ffffbf` and `#d7191c`.

use std::fmt::Write as _;

use idform_core::shape::Shape;
use idform_core::Vec2;

use crate::trajectory::EnergyRow;

const SIZE: f64 = 600.0;
const RAMP: [(f64, [u8; 3]); 3] = [(0.0, [0x2c, 0x7b, 0xb6]), (0.5, [0xff, 0xff, 0xbf]), (1.0, [0xd7, 0x19, 0x1c])];

/// Hex color for `t` in `[0, 1]` on the documented ramp.
pub fn ramp(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 1.0 };
    let k = if t <= RAMP[1].0 { 0 } else { 1 };
    let (t0, c0) = RAMP[k];
    let (t1, c1) = RAMP[k + 1];
    let u = (t - t0) / (t1 - t0);
    let mix = |a: u8, b: u8| (a as f64 + u * (b as f64 - a as f64)).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(c0[0], c1[0]), mix(c0[1], c1[1]), mix(c0[2], c1[2]))
}

/// Robots over the shape in the square `[-M, M]^2`.
pub fn snapshot_svg(shape: &Shape, robots: &[Vec2], domain_m: f64, title: &str) -> String {
    let scale = SIZE / (2.0 * domain_m);
    let px = |p: Vec2| ((p.x + domain_m) * scale, (domain_m - p.y) * scale);
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{}\" viewBox=\"0 0 {SIZE} {}\">\n",
        SIZE + 24.0,
        SIZE + 24.0
    );
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(s, "<g fill=\"#c8c8c8\">");
    for p in shape.points() {
        let (x, y) = px(*p);
        let _ = writeln!(s, "<circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"1\"/>");
    }
    s.push_str("</g>\n");
    let mus: Vec<f64> = robots.iter().map(|p| shape.mu(*p)).collect();
    let top = mus.iter().copied().fold(0.0, f64::max);
    let _ = writeln!(s, "<g class=\"robots\" stroke=\"black\" stroke-width=\"0.5\">");
    for (p, mu) in robots.iter().zip(&mus) {
        let (x, y) = px(*p);
        let t = if top > 0.0 { mu / top } else { 0.0 };
        let _ = writeln!(s, "<circle class=\"robot\" cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"4\" fill=\"{}\"/>", ramp(t));
    }
    s.push_str("</g>\n");
    let _ = writeln!(
        s,
        "<text x=\"6\" y=\"{}\" font-family=\"sans-serif\" font-size=\"14\">{}  (max mu {top:.3e})</text>",
        SIZE + 18.0,
        escape(title)
    );
    s.push_str("</svg>\n");
    s
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

const COLORS: [&str; 4] = ["#d7191c", "#2c7bb6", "#1a9641", "#7b3294"];

/// Physical rows of an energy trace renumbered by physical iteration, so
/// that traces from both planners share one axis.
pub fn physical_trace(rows: &[EnergyRow]) -> Vec<EnergyRow> {
    rows.iter()
        .filter(|r| r.phase.is_physical())
        .enumerate()
        .map(|(k, r)| EnergyRow { iteration: k as u64, ..*r })
        .collect()
}

/// Log-scale energy against iteration, one polyline per labelled series.
/// Non-positive energies are clipped to the bottom of the axis.
pub fn energy_svg(series: &[(String, Vec<EnergyRow>)]) -> String {
    let (w, h, pad) = (720.0, 420.0, 60.0);
    let pts = series.iter().flat_map(|(_, r)| r.iter());
    let xmax = pts.clone().map(|r| r.iteration).max().unwrap_or(1).max(1) as f64;
    let pos: Vec<f64> = pts.map(|r| r.psi).filter(|v| *v > 0.0 && v.is_finite()).collect();
    let lo = pos.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = pos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if lo.is_finite() { (lo.log10().floor(), hi.log10().ceil().max(lo.log10().floor() + 1.0)) } else { (0.0, 1.0) };
    let sx = |it: u64| pad + (w - 2.0 * pad) * it as f64 / xmax;
    let sy = |v: f64| {
        let l = if v > 0.0 && v.is_finite() { v.log10().clamp(lo, hi) } else { lo };
        h - pad - (h - 2.0 * pad) * (l - lo) / (hi - lo)
    };
    let mut s = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n");
    let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(
        s,
        "<g stroke=\"black\"><line x1=\"{pad}\" y1=\"{}\" x2=\"{}\" y2=\"{}\"/><line x1=\"{pad}\" y1=\"{pad}\" x2=\"{pad}\" y2=\"{}\"/></g>",
        h - pad,
        w - pad,
        h - pad,
        h - pad
    );
    let mut e = lo as i32;
    while e as f64 <= hi {
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{:.1}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">1e{e}</text>",
            pad - 4.0,
            sy(10f64.powi(e)) + 4.0
        );
        e += 1;
    }
    let _ = writeln!(
        s,
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">iteration (0 to {xmax})</text>",
        w / 2.0,
        h - pad / 3.0
    );
    for (k, (label, rows)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut line = String::new();
        for r in rows {
            let _ = write!(line, "{:.2},{:.2} ", sx(r.iteration), sy(r.psi));
        }
        let _ = writeln!(
            s,
            "<polyline class=\"series\" data-label=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.2\" points=\"{}\"/>",
            escape(label),
            line.trim_end()
        );
        let ly = pad + 16.0 * k as f64;
        let _ = writeln!(
            s,
            "<text x=\"{}\" y=\"{ly}\" font-family=\"sans-serif\" font-size=\"12\" fill=\"{color}\">{}</text>",
            w - pad - 80.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}
