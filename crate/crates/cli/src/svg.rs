//! SVG rendering of exact data. Coordinates are mapped exactly and printed at 12 significant
//! digits; nothing is computed here beyond that map.

use std::fmt::Write;

use okdh_core::lattice::rational::{format_rational, int, to_decimal, to_f64};
use okdh_core::measures::Measure;
use okdh_core::{DiscreteMeasure, Error, Rational, Result};

const WIDTH: i64 = 800;
const HEIGHT: i64 = 600;
const MARGIN: i64 = 60;
const SAMPLES: i64 = 100;

pub struct Canvas {
    x: (Rational, Rational),
    y: (Rational, Rational),
    body: String,
}

fn widen(lo: Rational, hi: Rational) -> (Rational, Rational) {
    if hi > lo {
        (lo, hi)
    } else {
        let hi = &lo + int(1);
        (lo, hi)
    }
}

/// 12 significant digits, without trailing zeros.
fn num(r: &Rational) -> String {
    let s = to_decimal(r, 12);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

impl Canvas {
    pub fn new(x: (Rational, Rational), y: (Rational, Rational)) -> Self {
        Self {
            x: widen(x.0, x.1),
            y: widen(y.0, y.1),
            body: String::new(),
        }
    }

    fn px(&self, x: &Rational) -> Rational {
        int(MARGIN) + (x - &self.x.0) / (&self.x.1 - &self.x.0) * int(WIDTH - 2 * MARGIN)
    }

    fn py(&self, y: &Rational) -> Rational {
        int(HEIGHT - MARGIN) - (y - &self.y.0) / (&self.y.1 - &self.y.0) * int(HEIGHT - 2 * MARGIN)
    }

    fn point(&self, p: &(Rational, Rational)) -> String {
        format!("{},{}", num(&self.px(&p.0)), num(&self.py(&p.1)))
    }

    pub fn stem(&mut self, x: &Rational, height: &Rational, color: &str) {
        let (px, base, top) = (
            num(&self.px(x)),
            num(&self.py(&int(0))),
            num(&self.py(height)),
        );
        let _ = writeln!(
            self.body,
            r#"<line x1="{px}" y1="{base}" x2="{px}" y2="{top}" stroke="{color}" stroke-width="2"/>"#
        );
        let _ = writeln!(
            self.body,
            r#"<circle cx="{px}" cy="{top}" r="3" fill="{color}"/>"#
        );
    }

    pub fn polyline(&mut self, pts: &[(Rational, Rational)], color: &str) {
        let coords: Vec<String> = pts.iter().map(|p| self.point(p)).collect();
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            coords.join(" ")
        );
    }

    pub fn polygon(&mut self, pts: &[(Rational, Rational)], fill: &str) {
        let coords: Vec<String> = pts.iter().map(|p| self.point(p)).collect();
        let _ = writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" fill-opacity="0.3" stroke="black" stroke-width="1"/>"#,
            coords.join(" ")
        );
    }

    pub fn marker(&mut self, p: &(Rational, Rational), color: &str) {
        let (cx, cy) = (num(&self.px(&p.0)), num(&self.py(&p.1)));
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx}" cy="{cy}" r="4" fill="{color}"/>"#
        );
    }

    pub fn finish(self, x_label: &str, y_label: &str) -> String {
        let (l, r) = (MARGIN, WIDTH - MARGIN);
        let (t, b) = (MARGIN, HEIGHT - MARGIN);
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
        );
        let _ = writeln!(
            out,
            r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
        );
        let _ = writeln!(
            out,
            r#"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="black"/>"#
        );
        let _ = writeln!(
            out,
            r#"<line x1="{l}" y1="{b}" x2="{l}" y2="{t}" stroke="black"/>"#
        );
        let label = |out: &mut String, x: i64, y: i64, anchor: &str, text: &str| {
            let _ = writeln!(
                out,
                r#"<text x="{x}" y="{y}" font-family="monospace" font-size="14" text-anchor="{anchor}">{text}</text>"#
            );
        };
        label(&mut out, l, b + 20, "middle", &format_rational(&self.x.0));
        label(&mut out, r, b + 20, "middle", &format_rational(&self.x.1));
        label(&mut out, l - 8, b + 5, "end", &format_rational(&self.y.0));
        label(&mut out, l - 8, t + 5, "end", &format_rational(&self.y.1));
        label(&mut out, (l + r) / 2, b + 40, "middle", x_label);
        label(&mut out, l - 40, (t + b) / 2, "middle", y_label);
        out.push_str(&self.body);
        out.push_str("</svg>\n");
        out
    }
}

/// Breakpoints plus `SAMPLES` interior points of each interval.
fn sample_density(m: &okdh_core::PiecewisePolyMeasure) -> Vec<Vec<(Rational, Rational)>> {
    m.breakpoints
        .windows(2)
        .zip(&m.densities)
        .map(|(w, p)| {
            let step = (&w[1] - &w[0]) / int(SAMPLES + 1);
            (0..=SAMPLES + 1)
                .map(|k| {
                    let t = &w[0] + &step * int(k);
                    let y = p.eval(&t);
                    (t, y)
                })
                .collect()
        })
        .collect()
}

/// Atoms as stems and densities as polylines; `overlay` atoms are drawn in a second colour.
pub fn plot_measure(measure: &Measure, overlay: Option<&DiscreteMeasure>) -> Result<String> {
    if measure.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    let (atoms, curves) = match measure {
        Measure::Discrete(d) => (d.atoms().to_vec(), Vec::new()),
        Measure::Piecewise(p) => (p.atoms.clone(), sample_density(p)),
    };
    let extra = overlay.map(|o| o.atoms().to_vec()).unwrap_or_default();
    let xs = atoms
        .iter()
        .chain(&extra)
        .map(|a| &a.0)
        .chain(curves.iter().flatten().map(|p| &p.0));
    let x_lo = xs.clone().min().cloned().unwrap_or_default();
    let x_hi = xs.max().cloned().unwrap_or_default();
    let y_hi = atoms
        .iter()
        .chain(&extra)
        .map(|a| &a.1)
        .chain(curves.iter().flatten().map(|p| &p.1))
        .max()
        .cloned()
        .unwrap_or_default();
    let mut c = Canvas::new((x_lo, x_hi), (int(0), y_hi));
    for curve in &curves {
        c.polyline(curve, "steelblue");
    }
    for (t, w) in &atoms {
        c.stem(t, w, "steelblue");
    }
    for (t, w) in &extra {
        c.stem(t, w, "darkorange");
    }
    Ok(c.finish("t", "mass / density"))
}

/// Vertices of a convex polygon in counter-clockwise order.
pub fn ccw(vertices: &[Vec<Rational>]) -> Vec<(Rational, Rational)> {
    let n = vertices.len().max(1) as i64;
    let cx: Rational = vertices.iter().map(|v| v[0].clone()).sum::<Rational>() / int(n);
    let cy: Rational = vertices.iter().map(|v| v[1].clone()).sum::<Rational>() / int(n);
    let mut pts: Vec<(Rational, Rational)> = vertices
        .iter()
        .map(|v| (v[0].clone(), v[1].clone()))
        .collect();
    pts.sort_by(|a, b| {
        let angle = |p: &(Rational, Rational)| to_f64(&(&p.1 - &cy)).atan2(to_f64(&(&p.0 - &cx)));
        angle(a).total_cmp(&angle(b))
    });
    pts
}

pub fn bounds(pts: &[(Rational, Rational)]) -> ((Rational, Rational), (Rational, Rational)) {
    let min = |f: fn(&(Rational, Rational)) -> &Rational| {
        pts.iter().map(f).min().cloned().unwrap_or_default()
    };
    let max = |f: fn(&(Rational, Rational)) -> &Rational| {
        pts.iter().map(f).max().cloned().unwrap_or_default()
    };
    (
        (min(|p| &p.0), max(|p| &p.0)),
        (min(|p| &p.1), max(|p| &p.1)),
    )
}
