//! SVG debug rendering: input objects by color class, active fragments
//! highlighted, separator stars and parts in distinct styles. Output is
//! deterministic for fixed input.

use std::fmt::Write;

use num_traits::ToPrimitive;

use starsep_core::fragmenter::FragmentSet;
use starsep_core::geom::Point;
use starsep_core::stars::StarSeparator;

use crate::formats::Instance;

const CLASS_COLORS: [&str; 8] =
    ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"];

fn fx(c: &starsep_core::Coord) -> f64 {
    c.to_f64().unwrap_or(0.0)
}

struct Canvas {
    body: String,
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl Canvas {
    fn new() -> Self {
        Canvas { body: String::new(), min_x: 0.0, min_y: 0.0, max_x: 1.0, max_y: 1.0 }
    }

    fn grow(&mut self, x: f64, y: f64) {
        self.min_x = self.min_x.min(x);
        self.min_y = self.min_y.min(y);
        self.max_x = self.max_x.max(x);
        self.max_y = self.max_y.max(y);
    }

    fn line(&mut self, p: &Point, q: &Point, stroke: &str, width: f64, dash: Option<&str>) {
        let (x1, y1, x2, y2) = (fx(&p.x), -fx(&p.y), fx(&q.x), -fx(&q.y));
        self.grow(x1, y1);
        self.grow(x2, y2);
        let dash = dash.map(|d| format!(" stroke-dasharray=\"{d}\"")).unwrap_or_default();
        writeln!(
            self.body,
            "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"{stroke}\" stroke-width=\"{width}\" stroke-linecap=\"round\"{dash}/>"
        )
        .unwrap();
    }

    fn ring(&mut self, ring: &[Point], stroke: &str, fill: &str, width: f64) {
        let mut d = String::new();
        for (i, v) in ring.iter().enumerate() {
            let (x, y) = (fx(&v.x), -fx(&v.y));
            self.grow(x, y);
            write!(d, "{}{x},{y} ", if i == 0 { "M" } else { "L" }).unwrap();
        }
        d.push('Z');
        writeln!(
            self.body,
            "  <path d=\"{d}\" stroke=\"{stroke}\" fill=\"{fill}\" fill-opacity=\"0.25\" stroke-width=\"{width}\"/>"
        )
        .unwrap();
    }

    fn circle(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        self.grow(x, y);
        writeln!(self.body, "  <circle cx=\"{x}\" cy=\"{y}\" r=\"{r}\" fill=\"{fill}\"/>").unwrap();
    }

    fn finish(self) -> String {
        let pad = ((self.max_x - self.min_x) + (self.max_y - self.min_y)).max(2.0) * 0.03;
        let (x, y) = (self.min_x - pad, self.min_y - pad);
        let (w, h) = (self.max_x - self.min_x + 2.0 * pad, self.max_y - self.min_y + 2.0 * pad);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"{x} {y} {w} {h}\">\n{}</svg>\n",
            self.body
        )
    }
}

/// Renders the instance with optional fragment and separator layers.
pub fn render_svg(
    inst: &Instance,
    fragments: Option<&FragmentSet>,
    separator: Option<&StarSeparator>,
) -> String {
    let mut canvas = Canvas::new();
    let n = inst.len();

    // Node membership for separator styling.
    let mut role = vec![0u8; n]; // 0 plain, 1 part A, 2 part B, 3 leaf, 4 center
    if let Some(sep) = separator {
        for &v in &sep.part_a {
            role[v] = 1;
        }
        for &v in &sep.part_b {
            role[v] = 2;
        }
        for star in &sep.stars {
            for &l in &star.leaves {
                role[l] = 3;
            }
            role[star.center] = 4;
        }
    }
    let style = |r: u8, class_color: &'static str| -> (&'static str, f64) {
        match r {
            1 => ("#4f9dd1", 1.4),
            2 => ("#64b564", 1.4),
            3 => ("#f2a33a", 2.0),
            4 => ("#000000", 3.2),
            _ => (class_color, 1.4),
        }
    };

    match inst {
        Instance::Segments(seg) => {
            for s in &seg.segments {
                let base = CLASS_COLORS[s.color % CLASS_COLORS.len()];
                let (stroke, width) = style(role[s.id], base);
                canvas.line(&s.p, &s.q, stroke, width, None);
            }
            if let Some(fs) = fragments {
                for f in fs.fragments.iter().filter(|f| f.is_active()) {
                    canvas.line(&f.p, &f.q, "#e3cb00", 3.0, Some("4 3"));
                }
                for f in fs.fragments.iter().filter(|f| f.is_active()) {
                    canvas.circle(fx(&f.p.x), -fx(&f.p.y), 0.9, "#444444");
                    canvas.circle(fx(&f.q.x), -fx(&f.q.y), 0.9, "#444444");
                }
            }
        }
        Instance::Polygons(ps) => {
            for p in ps {
                let base = CLASS_COLORS[p.id % CLASS_COLORS.len()];
                let (stroke, width) = style(role[p.id], base);
                canvas.ring(&p.outer, stroke, stroke, width);
                for h in &p.holes {
                    canvas.ring(h, stroke, "#ffffff", width * 0.8);
                }
            }
        }
        Instance::Graph(g) => {
            // Circle layout.
            let count = g.n().max(1) as f64;
            let r = 40.0 * count.sqrt();
            let pos = |u: usize| -> (f64, f64) {
                let angle = 2.0 * std::f64::consts::PI * (u as f64) / count;
                (r * angle.cos(), r * angle.sin())
            };
            for (u, v) in g.edges() {
                let (x1, y1) = pos(u as usize);
                let (x2, y2) = pos(v as usize);
                canvas.grow(x1, y1);
                canvas.grow(x2, y2);
                writeln!(
                    canvas.body,
                    "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>"
                )
                .unwrap();
            }
            for u in 0..g.n() {
                let (x, y) = pos(u);
                let fill = match role[u] {
                    1 => "#4f9dd1",
                    2 => "#64b564",
                    3 => "#f2a33a",
                    4 => "#000000",
                    _ => "#888888",
                };
                canvas.circle(x, y, 4.0, fill);
            }
        }
    }
    canvas.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{parse_instance, ParseOptions};

    #[test]
    fn empty_instance_renders() {
        let inst = parse_instance(
            br#"{"version":1,"segments":[]}"#,
            &ParseOptions::default(),
        )
        .unwrap();
        let svg = render_svg(&inst, None, None);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
    }

    #[test]
    fn fragments_layer_highlighted() {
        let bytes = br#"{"version":1,"segments":[
            {"id":0,"p":[0,0],"q":[4,0]},
            {"id":1,"p":[2,-1],"q":[2,1]}
        ]}"#;
        let inst = parse_instance(bytes, &ParseOptions::default()).unwrap();
        let crate::formats::Instance::Segments(seg) = &inst else { panic!() };
        let out = starsep_core::stars::segment_star_separator(seg).unwrap();
        let svg = render_svg(&inst, Some(&out.fragments), Some(&out.separator));
        // Three active fragments, each highlighted once.
        assert_eq!(svg.matches("stroke-dasharray").count(), 3);
        // Deterministic output.
        assert_eq!(svg, render_svg(&inst, Some(&out.fragments), Some(&out.separator)));
    }

    #[test]
    fn star_centers_distinct() {
        let bytes = br#"{"version":1,"segments":[
            {"id":0,"p":[0,10],"q":[40,10]},
            {"id":1,"p":[0,20],"q":[40,20]},
            {"id":2,"p":[0,30],"q":[40,30]},
            {"id":3,"p":[10,0],"q":[10,40]},
            {"id":4,"p":[20,0],"q":[20,40]},
            {"id":5,"p":[30,0],"q":[30,40]}
        ]}"#;
        let inst = parse_instance(bytes, &ParseOptions::default()).unwrap();
        let crate::formats::Instance::Segments(seg) = &inst else { panic!() };
        let out = starsep_core::stars::segment_star_separator(seg).unwrap();
        let svg = render_svg(&inst, None, Some(&out.separator));
        let centers = out.separator.stars.len();
        assert!(centers >= 1);
        assert_eq!(svg.matches("stroke=\"#000000\"").count(), centers);
    }
}
