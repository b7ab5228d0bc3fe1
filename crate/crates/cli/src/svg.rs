//! Phase portraits as plain SVG text.

use std::fmt::Write;

use nilfix_core::region::Curve;
use nilfix_core::{CompiledField, Region};

const SIZE: f64 = 480.0;
const GRID: usize = 24;

pub struct Portrait<'a> {
    pub field: &'a CompiledField,
    pub region: &'a Region,
    pub zeros: &'a [[f64; 2]],
    pub index: Option<i64>,
    pub title: &'a str,
}

struct Frame {
    lo: [f64; 2],
    scale: f64,
}

impl Frame {
    fn new(region: &Region) -> Self {
        let [lo, hi] = region.bbox();
        let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
        let pad = 0.1 * span;
        let c = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        let half = 0.5 * span + pad;
        Frame {
            lo: [c[0] - half, c[1] - half],
            scale: SIZE / (2.0 * half),
        }
    }

    fn px(&self, p: [f64; 2]) -> (f64, f64) {
        ((p[0] - self.lo[0]) * self.scale, SIZE - (p[1] - self.lo[1]) * self.scale)
    }

    fn world(&self, sx: f64, sy: f64) -> [f64; 2] {
        [self.lo[0] + sx / self.scale, self.lo[1] + (SIZE - sy) / self.scale]
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn curve(out: &mut String, frame: &Frame, c: &Curve) {
    match c {
        Curve::Circle { center, radius, .. } => {
            let (x, y) = frame.px(*center);
            let _ = writeln!(
                out,
                r#"<circle class="boundary" cx="{}" cy="{}" r="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
                num(x),
                num(y),
                num(radius * frame.scale)
            );
        }
        Curve::Polygon(v) => {
            let pts: Vec<String> = v
                .iter()
                .map(|&p| {
                    let (x, y) = frame.px(p);
                    format!("{},{}", num(x), num(y))
                })
                .collect();
            let _ = writeln!(
                out,
                r#"<polygon class="boundary" points="{}" fill="none" stroke="black" stroke-width="1.5"/>"#,
                pts.join(" ")
            );
        }
    }
}

pub fn render(p: &Portrait) -> String {
    let frame = Frame::new(p.region);
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">"#,
        s = SIZE
    );
    let _ = writeln!(out, "<title>{}</title>", escape(p.title));
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let cell = SIZE / GRID as f64;
    let _ = writeln!(out, r##"<g class="quiver" stroke="#4a6fa5" stroke-width="1">"##);
    for i in 0..GRID {
        for j in 0..GRID {
            let (sx, sy) = ((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell);
            let v = p.field.eval(frame.world(sx, sy));
            let n = v[0].hypot(v[1]);
            if !(n.is_finite() && n > 0.0) {
                continue;
            }
            let len = 0.4 * cell;
            let (dx, dy) = (len * v[0] / n, -len * v[1] / n);
            let (x0, y0, x1, y1) = (sx - dx, sy - dy, sx + dx, sy + dy);
            // Arrow head: two short strokes back from the tip.
            let (hx, hy) = (0.35 * dx, 0.35 * dy);
            let _ = writeln!(
                out,
                r#"<path d="M{} {}L{} {}M{} {}L{} {}L{} {}"/>"#,
                num(x0),
                num(y0),
                num(x1),
                num(y1),
                num(x1 - hx - hy),
                num(y1 - hy + hx),
                num(x1),
                num(y1),
                num(x1 - hx + hy),
                num(y1 - hy - hx)
            );
        }
    }
    let _ = writeln!(out, "</g>");

    for c in p.region.boundary() {
        curve(&mut out, &frame, c);
    }
    for &z in p.zeros {
        let (x, y) = frame.px(z);
        let _ = writeln!(out, r#"<circle class="zero" cx="{}" cy="{}" r="5" fill="red"/>"#, num(x), num(y));
    }
    let label = match p.index {
        Some(i) => format!("index = {i}"),
        None => "index = undefined".to_string(),
    };
    let _ = writeln!(
        out,
        r#"<text x="10" y="24" font-family="monospace" font-size="16">{label}</text>"#
    );
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
