//! Small self-contained SVG writer for diagnostic plots.
//!
//! Produces static scatter and line plots without pulling in a charting
//! dependency: the outputs here are smoke-test artifacts (constellation
//! scatters, criterion curves), not publication graphics. Everything is
//! rendered into a `String`; callers decide where to write it.

use std::fmt::Write as _;

/// Data-space rectangle mapped onto the drawing area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min_x: f64,
    pub max_x: f64,
    pub min_y: f64,
    pub max_y: f64,
}

impl Bounds {
    /// Tight bounding box of a point set; `None` when the set is empty or
    /// contains a non-finite coordinate.
    pub fn fit<I>(points: I) -> Option<Bounds>
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut b: Option<Bounds> = None;
        for (x, y) in points {
            if !x.is_finite() || !y.is_finite() {
                return None;
            }
            b = Some(match b {
                None => Bounds { min_x: x, max_x: x, min_y: y, max_y: y },
                Some(c) => Bounds {
                    min_x: c.min_x.min(x),
                    max_x: c.max_x.max(x),
                    min_y: c.min_y.min(y),
                    max_y: c.max_y.max(y),
                },
            });
        }
        b
    }

    /// Expands each side by `frac` of the span. Degenerate spans (single
    /// point, collinear set) are widened to a unit span first so the mapping
    /// below never divides by zero.
    pub fn padded(self, frac: f64) -> Bounds {
        let mut b = self;
        if b.max_x - b.min_x < 1e-12 {
            b.min_x -= 0.5;
            b.max_x += 0.5;
        }
        if b.max_y - b.min_y < 1e-12 {
            b.min_y -= 0.5;
            b.max_y += 0.5;
        }
        let dx = (b.max_x - b.min_x) * frac;
        let dy = (b.max_y - b.min_y) * frac;
        Bounds {
            min_x: b.min_x - dx,
            max_x: b.max_x + dx,
            min_y: b.min_y - dy,
            max_y: b.max_y + dy,
        }
    }
}

/// Incrementally built SVG document with a fixed data-to-pixel mapping.
pub struct SvgPlot {
    width: f64,
    height: f64,
    margin: f64,
    bounds: Bounds,
    body: String,
}

impl SvgPlot {
    pub fn new(width: f64, height: f64, bounds: Bounds) -> SvgPlot {
        SvgPlot { width, height, margin: 40.0, bounds, body: String::new() }
    }

    /// Maps a data point to pixel coordinates (SVG y axis points down).
    pub fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let b = &self.bounds;
        let px = self.margin
            + (x - b.min_x) / (b.max_x - b.min_x) * (self.width - 2.0 * self.margin);
        let py = self.height
            - self.margin
            - (y - b.min_y) / (b.max_y - b.min_y) * (self.height - 2.0 * self.margin);
        (px, py)
    }

    /// Border rectangle plus dashed zero axes where they cross the view.
    pub fn frame(&mut self) {
        let (w, h, m) = (self.width, self.height, self.margin);
        let _ = write!(
            self.body,
            "<rect x=\"{m:.2}\" y=\"{m:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"none\" stroke=\"#444\"/>",
            w - 2.0 * m,
            h - 2.0 * m
        );
        if self.bounds.min_x < 0.0 && self.bounds.max_x > 0.0 {
            let (px, _) = self.map(0.0, self.bounds.min_y);
            let _ = write!(
                self.body,
                "<line x1=\"{px:.2}\" y1=\"{m:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" \
                 stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>",
                h - m
            );
        }
        if self.bounds.min_y < 0.0 && self.bounds.max_y > 0.0 {
            let (_, py) = self.map(self.bounds.min_x, 0.0);
            let _ = write!(
                self.body,
                "<line x1=\"{m:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" \
                 stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>",
                w - m
            );
        }
    }

    pub fn circle(&mut self, x: f64, y: f64, r: f64, color: &str) {
        let (px, py) = self.map(x, y);
        let _ = write!(
            self.body,
            "<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"{r:.2}\" fill=\"{color}\"/>"
        );
    }

    /// X-shaped marker.
    pub fn cross(&mut self, x: f64, y: f64, half: f64, color: &str) {
        let (px, py) = self.map(x, y);
        let _ = write!(
            self.body,
            "<path d=\"M{:.2} {:.2} L{:.2} {:.2} M{:.2} {:.2} L{:.2} {:.2}\" \
             stroke=\"{color}\" stroke-width=\"2\" fill=\"none\"/>",
            px - half,
            py - half,
            px + half,
            py + half,
            px - half,
            py + half,
            px + half,
            py - half
        );
    }

    /// Unfilled square marker.
    pub fn square(&mut self, x: f64, y: f64, half: f64, color: &str) {
        let (px, py) = self.map(x, y);
        let _ = write!(
            self.body,
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" \
             fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>",
            px - half,
            py - half,
            2.0 * half,
            2.0 * half
        );
    }

    pub fn polyline(&mut self, points: &[(f64, f64)], color: &str) {
        if points.is_empty() {
            return;
        }
        let mut attr = String::new();
        for &(x, y) in points {
            let (px, py) = self.map(x, y);
            let _ = write!(attr, "{px:.2},{py:.2} ");
        }
        let _ = write!(
            self.body,
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>",
            attr.trim_end()
        );
    }

    /// Caption in the top-left corner of the drawing area.
    pub fn label(&mut self, text: &str) {
        let _ = write!(
            self.body,
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"12\">{}</text>",
            self.margin,
            self.margin - 8.0,
            text
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" \
             viewBox=\"0 0 {:.0} {:.0}\">{}</svg>\n",
            self.width, self.height, self.width, self.height, self.body
        )
    }
}
