//! Phase-plane figures: nullclines, the conic `F = 0`, barrier lines and an
//! optional trajectory, as a self-contained SVG document.
//!
//! Colors follow the usual figure legend: red `u`-nullcline, blue
//! `v`-nullcline, green conic, magenta `q`-lines, gold `p`-line, dashed black
//! trajectory. Every drawn element carries a class so that tests (and
//! people) can find it.

use std::fmt::Write;

use nbarrier_core::{ScaledParams, Segment, Weights};

const SIZE: f64 = 520.0;
const MARGIN: f64 = 50.0;
const CONIC_SAMPLES: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineKind {
    Q,
    P,
}

#[derive(Debug, Clone)]
pub struct LevelLine {
    pub kind: LineKind,
    pub label: &'static str,
    pub level: f64,
    pub segment: Segment,
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub params: ScaledParams,
    pub weights: Weights,
    pub title: String,
    pub lines: Vec<LevelLine>,
    pub trajectory: Vec<(f64, f64)>,
    pub marker: Option<(f64, f64)>,
}

/// Positive root `v` of `F(u, v) = 0` for `u` in `[0, 1]`.
pub fn conic_v(p: &ScaledParams, w: &Weights, u: f64) -> f64 {
    let bk = w.beta * p.k();
    let s = w.alpha * p.a1() + bk * p.a2();
    let b = bk - s * u;
    let disc = b * b + 4.0 * bk * w.alpha * u * (1.0 - u);
    (b + disc.max(0.0).sqrt()) / (2.0 * bk)
}

struct Frame {
    extent: f64,
}

impl Frame {
    fn x(&self, u: f64) -> f64 {
        MARGIN + u / self.extent * (SIZE - 2.0 * MARGIN)
    }

    fn y(&self, v: f64) -> f64 {
        SIZE - MARGIN - v / self.extent * (SIZE - 2.0 * MARGIN)
    }

    fn point(&self, (u, v): (f64, f64)) -> String {
        format!("{:.2},{:.2}", self.x(u), self.y(v))
    }
}

fn tick_step(extent: f64) -> f64 {
    let mut scale = 1e-3;
    loop {
        for m in [1.0, 2.0, 2.5, 5.0] {
            let step = m * scale;
            if extent / step <= 10.0 {
                return step;
            }
        }
        scale *= 10.0;
    }
}

fn line(out: &mut String, f: &Frame, class: &str, stroke: &str, a: (f64, f64), b: (f64, f64), extra: &str) {
    let _ = writeln!(
        out,
        r#"  <line class="{class}" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{stroke}" stroke-width="2"{extra}/>"#,
        f.x(a.0),
        f.y(a.1),
        f.x(b.0),
        f.y(b.1),
    );
}

pub fn render(fig: &Figure) -> String {
    let p = &fig.params;
    let mut extent = 1.1f64;
    for l in &fig.lines {
        extent = extent.max(l.segment.from.0).max(l.segment.to.1);
    }
    for &(u, v) in &fig.trajectory {
        extent = extent.max(u).max(v);
    }
    let f = Frame { extent };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(out, r#"  <text class="title" x="{}" y="24" text-anchor="middle">{}</text>"#, SIZE / 2.0, fig.title);

    // axes and ticks
    line(&mut out, &f, "axis", "black", (0.0, 0.0), (extent, 0.0), r#" stroke-width="1""#);
    line(&mut out, &f, "axis", "black", (0.0, 0.0), (0.0, extent), r#" stroke-width="1""#);
    let step = tick_step(extent);
    let mut i = 0;
    while i as f64 * step <= extent + 1e-12 {
        let t = i as f64 * step;
        let label = format!("{}", (t * 1000.0).round() / 1000.0);
        let _ = writeln!(
            out,
            r#"  <text class="tick" x="{:.2}" y="{:.2}" text-anchor="middle">{label}</text>"#,
            f.x(t),
            f.y(0.0) + 16.0
        );
        if i > 0 {
            let _ = writeln!(
                out,
                r#"  <text class="tick" x="{:.2}" y="{:.2}" text-anchor="end">{label}</text>"#,
                f.x(0.0) - 6.0,
                f.y(t) + 4.0
            );
        }
        i += 1;
    }
    let _ = writeln!(out, r#"  <text class="axis-label" x="{:.2}" y="{:.2}">u</text>"#, SIZE - MARGIN + 8.0, f.y(0.0) + 4.0);
    let _ = writeln!(out, r#"  <text class="axis-label" x="{:.2}" y="{:.2}">v</text>"#, f.x(0.0) - 4.0, MARGIN - 10.0);

    // nullclines 1 - u - a1 v = 0 and 1 - a2 u - v = 0
    line(&mut out, &f, "nullcline u-nullcline", "red", (1.0, 0.0), (0.0, 1.0 / p.a1()), "");
    line(&mut out, &f, "nullcline v-nullcline", "blue", (1.0 / p.a2(), 0.0), (0.0, 1.0), "");

    // the arc of F = 0 inside the quadrant, from (0, 1) to (1, 0)
    let mut d = String::new();
    for i in 0..=CONIC_SAMPLES {
        let u = i as f64 / CONIC_SAMPLES as f64;
        let v = conic_v(p, &fig.weights, u);
        let _ = write!(d, "{}{}", if i == 0 { "M" } else { " L" }, f.point((u, v)));
    }
    let _ = writeln!(out, r#"  <path class="conic" d="{d}" fill="none" stroke="green" stroke-width="2"/>"#);

    for l in &fig.lines {
        let (class, stroke) = match l.kind {
            LineKind::Q => ("q-line", "magenta"),
            LineKind::P => ("p-line", "gold"),
        };
        let extra = format!(r#" data-label="{}" data-level="{}""#, l.label, l.level);
        line(&mut out, &f, class, stroke, l.segment.from, l.segment.to, &extra);
    }

    if !fig.trajectory.is_empty() {
        let mut pts: Vec<String> = Vec::with_capacity(fig.trajectory.len());
        for &pt in &fig.trajectory {
            let s = f.point(pt);
            if pts.last() != Some(&s) {
                pts.push(s);
            }
        }
        let _ = writeln!(
            out,
            r#"  <polyline class="trajectory" points="{}" fill="none" stroke="black" stroke-width="1.5" stroke-dasharray="6 4"/>"#,
            pts.join(" ")
        );
    }

    if let Some((u, v)) = fig.marker {
        let _ = writeln!(
            out,
            r#"  <circle class="tangency" cx="{:.2}" cy="{:.2}" r="4" fill="black" data-u="{u}" data-v="{v}"/>"#,
            f.x(u),
            f.y(v)
        );
    }
    out.push_str("</svg>\n");
    out
}
