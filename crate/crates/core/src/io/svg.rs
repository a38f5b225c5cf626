//! Plain SVG plots in physical coordinates.

use std::fmt::Write as _;

use crate::partition::DomainShape;

/// Rendered width in pixels; the height follows the aspect ratio.
pub const SVG_WIDTH: f64 = 1000.0;

/// A drawing whose view box is the physical domain with `y` pointing up.
#[derive(Clone, Debug)]
pub struct SvgPlot {
    min: [f64; 2],
    max: [f64; 2],
    body: String,
}

impl SvgPlot {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        SvgPlot { min, max, body: String::new() }
    }

    /// View box and outline of `shape`.
    pub fn for_domain(shape: &DomainShape) -> Self {
        let mut p = match shape {
            DomainShape::Rectangle { alpha } => SvgPlot::new([0.0, 0.0], [alpha * std::f64::consts::PI, std::f64::consts::PI]),
            DomainShape::Disk => SvgPlot::new([-1.0, -1.0], [1.0, 1.0]),
        };
        let stroke = p.stroke(2.0);
        match shape {
            DomainShape::Rectangle { .. } => {
                let (w, h) = (p.max[0] - p.min[0], p.max[1] - p.min[1]);
                let _ = writeln!(p.body, r#"<rect x="0" y="0" width="{w:.6}" height="{h:.6}" fill="none" stroke="black" stroke-width="{stroke:.6}"/>"#);
            }
            DomainShape::Disk => {
                let _ = writeln!(p.body, r#"<circle cx="0" cy="0" r="1" fill="none" stroke="black" stroke-width="{stroke:.6}"/>"#);
            }
        }
        p
    }

    /// Physical length of `px` rendered pixels.
    fn stroke(&self, px: f64) -> f64 {
        px * (self.max[0] - self.min[0]) / SVG_WIDTH
    }

    pub fn polyline(&mut self, points: &[[f64; 2]], color: &str, px: f64, dashed: bool) {
        if points.len() < 2 {
            return;
        }
        let pts: Vec<String> = points.iter().map(|p| format!("{:.6},{:.6}", p[0], p[1])).collect();
        let w = self.stroke(px);
        let dash = if dashed { format!(r#" stroke-dasharray="{:.6} {:.6}""#, 4.0 * w, 2.0 * w) } else { String::new() };
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="{w:.6}"{dash}/>"#,
            pts.join(" ")
        );
    }

    pub fn circle(&mut self, c: [f64; 2], px: f64, color: &str) {
        let r = self.stroke(px);
        let _ = writeln!(self.body, r#"<circle cx="{:.6}" cy="{:.6}" r="{r:.6}" fill="{color}"/>"#, c[0], c[1]);
    }

    pub fn render(&self) -> String {
        let (w, h) = (self.max[0] - self.min[0], self.max[1] - self.min[1]);
        let height = (SVG_WIDTH * h / w).round();
        // Flip y so the picture matches the usual mathematical orientation.
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_WIDTH}\" height=\"{height}\" viewBox=\"{:.6} {:.6} {w:.6} {h:.6}\">\n<g transform=\"scale(1 -1)\">\n{}</g>\n</svg>\n",
            self.min[0],
            -self.max[1],
            self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn viewport_is_the_domain() {
        let mut p = SvgPlot::for_domain(&DomainShape::Rectangle { alpha: 1.5 });
        p.polyline(&[[0.0, 0.0], [1.0, 1.0]], "blue", 2.0, false);
        let s = p.render();
        assert!(s.contains("width=\"1000\" height=\"667\""));
        assert!(s.contains("points=\"0.000000,0.000000 1.000000,1.000000\""));
    }
}
