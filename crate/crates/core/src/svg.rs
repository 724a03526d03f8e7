//! Minimal deterministic SVG writer.
//!
//! Coordinates are printed with a fixed number of decimals so that equal
//! input gives byte-identical documents.

use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub x: (f64, f64),
    pub y: (f64, f64),
}

impl Bounds {
    /// Smallest box around the points, padded by 5% on every side.
    pub fn around(points: impl IntoIterator<Item = (f64, f64)>) -> Option<Self> {
        let mut b: Option<Bounds> = None;
        for (x, y) in points {
            if !x.is_finite() || !y.is_finite() {
                continue;
            }
            b = Some(match b {
                None => Bounds { x: (x, x), y: (y, y) },
                Some(b) => Bounds { x: (b.x.0.min(x), b.x.1.max(x)), y: (b.y.0.min(y), b.y.1.max(y)) },
            });
        }
        b.map(|b| {
            let pad = 0.05 * (b.x.1 - b.x.0).max(b.y.1 - b.y.0).max(1e-9);
            Bounds { x: (b.x.0 - pad, b.x.1 + pad), y: (b.y.0 - pad, b.y.1 + pad) }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Style {
    pub width: f64,
    pub stroke: f64,
}

impl Default for Style {
    fn default() -> Self {
        Style { width: 800.0, stroke: 1.0 }
    }
}

#[derive(Debug, Clone)]
pub struct Svg {
    bounds: Bounds,
    style: Style,
    scale: f64,
    height: f64,
    layers: Vec<(String, String)>,
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

impl Svg {
    pub fn new(bounds: Bounds, style: Style) -> Self {
        let dx = (bounds.x.1 - bounds.x.0).max(1e-12);
        let dy = (bounds.y.1 - bounds.y.0).max(1e-12);
        let scale = style.width / dx;
        Self { bounds, style, scale, height: (dy * scale).ceil(), layers: Vec::new() }
    }

    fn map(&self, (x, y): (f64, f64)) -> (f64, f64) {
        ((x - self.bounds.x.0) * self.scale, self.height - (y - self.bounds.y.0) * self.scale)
    }

    fn layer(&mut self, id: &str) -> &mut String {
        if let Some(i) = self.layers.iter().position(|(n, _)| n == id) {
            return &mut self.layers[i].1;
        }
        self.layers.push((id.to_string(), String::new()));
        &mut self.layers.last_mut().expect("just pushed").1
    }

    /// Adds an empty layer so it appears even without content.
    pub fn ensure_layer(&mut self, id: &str) {
        self.layer(id);
    }

    pub fn polyline(&mut self, layer: &str, pts: &[(f64, f64)], color: &str, width: f64) {
        let finite: Vec<_> = pts.iter().copied().filter(|p| p.0.is_finite() && p.1.is_finite()).collect();
        if finite.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (i, p) in finite.iter().enumerate() {
            let (x, y) = self.map(*p);
            let _ = write!(d, "{}{},{}", if i == 0 { "" } else { " " }, num(x), num(y));
        }
        let w = width * self.style.stroke;
        let el = format!("<polyline points=\"{d}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"{}\"/>\n", num(w));
        self.layer(layer).push_str(&el);
    }

    pub fn circle(&mut self, layer: &str, c: (f64, f64), r_px: f64, color: &str) {
        let (x, y) = self.map(c);
        let el = format!("<circle cx=\"{}\" cy=\"{}\" r=\"{}\" fill=\"{color}\"/>\n", num(x), num(y), num(r_px));
        self.layer(layer).push_str(&el);
    }

    pub fn finish(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">",
            num(self.style.width),
            num(self.height),
            num(self.style.width),
            num(self.height)
        );
        let _ = writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
        for (id, body) in &self.layers {
            let _ = writeln!(s, "<g id=\"{id}\">");
            s.push_str(body);
            let _ = writeln!(s, "</g>");
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_layered() {
        let b = Bounds::around([(0.0, 0.0), (1.0, 1.0)]).unwrap();
        let draw = || {
            let mut s = Svg::new(b, Style::default());
            s.ensure_layer("wall");
            s.polyline("chords", &[(0.0, 0.0), (1.0, 0.5)], "black", 1.0);
            s.circle("chords", (0.5, 0.5), 2.0, "red");
            s.finish()
        };
        let a = draw();
        assert_eq!(a, draw());
        assert!(a.contains("<g id=\"wall\">\n</g>"));
        assert!(a.find("id=\"wall\"").unwrap() < a.find("id=\"chords\"").unwrap());
    }
}
