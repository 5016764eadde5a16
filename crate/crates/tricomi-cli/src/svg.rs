//! Self-contained SVG plots on a fixed 800x600 view box.

use std::fmt::Write as _;

use tricomi::constants::Regime;
use tricomi::eigen::field::raster;
use tricomi::eigen::Grid;
use tricomi::{CurveKind, TricomiDomain};

const W: f64 = 800.0;
const H: f64 = 600.0;
const LEFT: f64 = 90.0;
const RIGHT: f64 = 40.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 60.0;

struct Frame {
    x: (f64, f64),
    y: (f64, f64),
    /// Unpadded data ranges, where the ticks go.
    data: ((f64, f64), (f64, f64)),
}

impl Frame {
    fn new(x: (f64, f64), y: (f64, f64)) -> Self {
        let pad = |(a, b): (f64, f64)| {
            let d = if b > a { 0.04 * (b - a) } else { 1.0 };
            (a - d, b + d)
        };
        Frame { x: pad(x), y: pad(y), data: (x, y) }
    }

    fn px(&self, x: f64) -> f64 {
        LEFT + (x - self.x.0) / (self.x.1 - self.x.0) * (W - LEFT - RIGHT)
    }

    fn py(&self, y: f64) -> f64 {
        H - BOTTOM - (y - self.y.0) / (self.y.1 - self.y.0) * (H - TOP - BOTTOM)
    }

    fn pt(&self, x: f64, y: f64) -> String {
        format!("{:.2},{:.2}", self.px(x), self.py(y))
    }
}

fn header(title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}" font-family="sans-serif" font-size="13">"#);
    let _ = writeln!(s, r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="28" text-anchor="middle" font-size="16">{title}</text>"#, W / 2.0);
    s
}

fn ticks(a: f64, b: f64) -> Vec<f64> {
    (0..=4).map(|i| a + (b - a) * i as f64 / 4.0).collect()
}

fn axes(s: &mut String, f: &Frame, xlabel: &str, ylabel: &str) {
    let (x0, x1) = (f.px(f.x.0), f.px(f.x.1));
    let (y0, y1) = (f.py(f.y.0), f.py(f.y.1));
    let _ = writeln!(s, r#"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#, x1 - x0, y0 - y1);
    for t in ticks(f.data.0 .0, f.data.0 .1) {
        let p = f.px(t);
        let _ = writeln!(s, r#"<line x1="{p:.2}" y1="{y0:.2}" x2="{p:.2}" y2="{:.2}" stroke="black"/>"#, y0 + 5.0);
        let _ = writeln!(s, r#"<text x="{p:.2}" y="{:.2}" text-anchor="middle">{t:.3}</text>"#, y0 + 20.0);
    }
    for t in ticks(f.data.1 .0, f.data.1 .1) {
        let p = f.py(t);
        let _ = writeln!(s, r#"<line x1="{:.2}" y1="{p:.2}" x2="{x0:.2}" y2="{p:.2}" stroke="black"/>"#, x0 - 5.0);
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{t:.3}</text>"#, x0 - 8.0, p + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{xlabel}</text>"#, (x0 + x1) / 2.0, H - 15.0);
    let _ = writeln!(s, r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{ylabel}</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0);
}

fn caption(d: &TricomiDomain<f64>) -> String {
    format!("x0 = {:.10}, regime {}", d.x0, Regime::of(d.x0).label())
}

fn vline(s: &mut String, f: &Frame, x: f64, label: &str) {
    let p = f.px(x);
    let _ = writeln!(s, r#"<line x1="{p:.2}" y1="{:.2}" x2="{p:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#, f.py(f.y.0), f.py(f.y.1));
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" fill="gray">{label}</text>"#, p + 4.0, f.py(f.y.1) + 14.0);
}

pub fn h_profile(d: &TricomiDomain<f64>) -> String {
    let n = 400;
    let xs: Vec<f64> = (0..=n).map(|i| 2.0 * d.x0 * (1.0 - i as f64 / n as f64)).collect();
    let hs: Vec<f64> = xs.iter().map(|&x| d.h_clamped(x)).collect();
    let lo = hs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = hs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let f = Frame::new((2.0 * d.x0, 0.0), (lo, hi));
    let mut s = header(&format!("h on [2x0, 0]; {}", caption(d)));
    axes(&mut s, &f, "x", "h(x)");
    vline(&mut s, &f, d.x0, "x0");
    let r = d.x0 * d.x0 - 3.0 / 16.0;
    if r > 0.0 {
        vline(&mut s, &f, d.x0 + r.sqrt(), "x+");
        vline(&mut s, &f, d.x0 - r.sqrt(), "x-");
    }
    let pts: Vec<String> = xs.iter().zip(&hs).map(|(&x, &h)| f.pt(x, h)).collect();
    let _ = writeln!(s, r#"<polyline id="h" fill="none" stroke="navy" stroke-width="2" points="{}"/>"#, pts.join(" "));
    s.push_str("</svg>\n");
    s
}

fn outline_points(d: &TricomiDomain<f64>) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for kind in [CurveKind::AC, CurveKind::BC, CurveKind::Sigma] {
        let c = d.boundary_curve(kind);
        let (t0, t1) = c.range;
        for i in 0..200 {
            let p = c.position(t0 + (t1 - t0) * i as f64 / 200.0);
            out.push((p.x, p.y));
        }
    }
    out
}

fn outline(s: &mut String, f: &Frame, d: &TricomiDomain<f64>) {
    let pts: Vec<String> = outline_points(d).iter().map(|&(x, y)| f.pt(x, y)).collect();
    let _ = writeln!(s, r#"<polygon id="boundary" fill="none" stroke="black" stroke-width="1.5" points="{}"/>"#, pts.join(" "));
    for (name, p, dy) in [("A", d.a, -8.0), ("B", d.b, -8.0), ("C", d.c, 18.0)] {
        let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{name}</text>"#, f.px(p.x), f.py(p.y) + dy);
    }
}

fn domain_frame(d: &TricomiDomain<f64>) -> Frame {
    Frame::new((2.0 * d.x0, 0.0), (d.y_c, d.y_max()))
}

pub fn domain(d: &TricomiDomain<f64>) -> String {
    let f = domain_frame(d);
    let mut s = header(&format!("Tricomi domain; {}", caption(d)));
    axes(&mut s, &f, "x", "y");
    let _ = writeln!(s, r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="gray" stroke-dasharray="4 3"/>"#, f.px(2.0 * d.x0), f.py(0.0), f.px(0.0), f.py(0.0));
    outline(&mut s, &f, d);
    s.push_str("</svg>\n");
    s
}

fn color(t: f64) -> String {
    const STOPS: [(f64, f64, f64); 5] =
        [(68.0, 1.0, 84.0), (59.0, 82.0, 139.0), (33.0, 145.0, 140.0), (94.0, 201.0, 98.0), (253.0, 231.0, 37.0)];
    let t = t.clamp(0.0, 1.0) * 4.0;
    let i = (t.floor() as usize).min(3);
    let r = t - i as f64;
    let (a, b) = (STOPS[i], STOPS[i + 1]);
    let mix = |p: f64, q: f64| (p + (q - p) * r).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

pub fn eigen(d: &TricomiDomain<f64>, grid: &Grid, u: &[f64], lambda: f64) -> String {
    let f = domain_frame(d);
    let mut s = header(&format!("principal eigenfunction, lambda = {lambda:.6}; {}", caption(d)));
    axes(&mut s, &f, "x", "y");
    let (x_lo, x_hi, y_lo, y_hi) = grid.bbox();
    let nx = 120;
    let ny = ((nx as f64) * (y_hi - y_lo) / (x_hi - x_lo)).round().max(1.0) as usize;
    let vals = raster(grid, u, nx, ny);
    let (lo, hi) = vals.iter().filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (cw, ch) = ((x_hi - x_lo) / nx as f64, (y_hi - y_lo) / ny as f64);
    s.push_str("<g id=\"field\" shape-rendering=\"crispEdges\">\n");
    for r in 0..ny {
        for c in 0..nx {
            let v = vals[r * nx + c];
            if !v.is_finite() {
                continue;
            }
            let (x, y) = (x_lo + c as f64 * cw, y_lo + (r + 1) as f64 * ch);
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"/>"#,
                f.px(x),
                f.py(y),
                f.px(x + cw) - f.px(x) + 0.3,
                f.py(y - ch) - f.py(y) + 0.3,
                color((v - lo) / span)
            );
        }
    }
    s.push_str("</g>\n");
    outline(&mut s, &f, d);
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="end">u in [{lo:.4}, {hi:.4}]</text>"#, W - RIGHT, H - 15.0);
    s.push_str("</svg>\n");
    s
}
