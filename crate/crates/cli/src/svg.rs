//! Minimal hand-rolled SVG emission. Plots are drawn in chart coordinates
//! (no metric-true rendering); axes and the chart-domain boundary are
//! included so the pictures stay interpretable as diagnostics.

use hadamard_core::manifold::{MetricModel, Region};

/// Fixed-width canvas over a 2-d chart region; the vertical scale matches
/// the horizontal one so circles stay round.
pub struct Canvas {
    region: Region,
    scale: f64,
    width: f64,
    height: f64,
    pad: f64,
    body: Vec<String>,
}

const WIDTH: f64 = 640.0;
const PAD: f64 = 24.0;

impl Canvas {
    pub fn new(region: &Region) -> Canvas {
        let dx = region.max[0] - region.min[0];
        let dy = region.max[1] - region.min[1];
        let scale = (WIDTH - 2.0 * PAD) / dx;
        Canvas {
            region: region.clone(),
            scale,
            width: WIDTH,
            height: scale * dy + 2.0 * PAD,
            pad: PAD,
            body: Vec::new(),
        }
    }

    fn px(&self, x: f64) -> f64 {
        self.pad + (x - self.region.min[0]) * self.scale
    }

    /// Chart y grows upward, SVG y grows downward.
    fn py(&self, y: f64) -> f64 {
        self.height - self.pad - (y - self.region.min[1]) * self.scale
    }

    pub fn line(&mut self, a: [f64; 2], b: [f64; 2], stroke: &str, width: f64) {
        self.body.push(format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
            self.px(a[0]), self.py(a[1]), self.px(b[0]), self.py(b[1]),
        ));
    }

    pub fn polyline(&mut self, pts: &[[f64; 2]], stroke: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let path: Vec<String> = pts
            .iter()
            .map(|p| format!("{:.2},{:.2}", self.px(p[0]), self.py(p[1])))
            .collect();
        self.body.push(format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
            path.join(" "),
        ));
    }

    pub fn dot(&mut self, c: [f64; 2], r: f64, fill: &str) {
        self.body.push(format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r}\" fill=\"{fill}\"/>",
            self.px(c[0]),
            self.py(c[1]),
        ));
    }

    pub fn circle_outline(&mut self, c: [f64; 2], chart_radius: f64, stroke: &str) {
        self.body.push(format!(
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{:.2}\" fill=\"none\" stroke=\"{stroke}\" stroke-width=\"1.5\"/>",
            self.px(c[0]),
            self.py(c[1]),
            chart_radius * self.scale,
        ));
    }

    /// Axis-aligned filled cell centered at a grid point.
    pub fn cell(&mut self, center: [f64; 2], w: f64, h: f64, fill: &str) {
        self.body.push(format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{fill}\"/>",
            self.px(center[0] - 0.5 * w),
            self.py(center[1] + 0.5 * h),
            w * self.scale,
            h * self.scale,
        ));
    }

    pub fn cross(&mut self, c: [f64; 2], r_px: f64, stroke: &str) {
        let (x, y) = (self.px(c[0]), self.py(c[1]));
        self.body.push(format!(
            "<path d=\"M {:.2} {:.2} L {:.2} {:.2} M {:.2} {:.2} L {:.2} {:.2}\" stroke=\"{stroke}\" stroke-width=\"2\"/>",
            x - r_px, y - r_px, x + r_px, y + r_px,
            x - r_px, y + r_px, x + r_px, y - r_px,
        ));
    }

    /// Coordinate axes (where they cross the region).
    pub fn axes(&mut self) {
        let r = self.region.clone();
        if r.min[0] <= 0.0 && r.max[0] >= 0.0 {
            self.line([0.0, r.min[1]], [0.0, r.max[1]], "#c8c8c8", 1.0);
        }
        if r.min[1] <= 0.0 && r.max[1] >= 0.0 {
            self.line([r.min[0], 0.0], [r.max[0], 0.0], "#c8c8c8", 1.0);
        }
    }

    /// The chart-domain boundary: the absolute for the hyperbolic models.
    pub fn chart_boundary(&mut self, model: &MetricModel) {
        match model {
            MetricModel::HyperbolicHalfPlane { .. } => {
                let r = self.region.clone();
                if r.min[1] <= 0.05 {
                    self.line([r.min[0], 0.0], [r.max[0], 0.0], "#303030", 2.0);
                }
            }
            MetricModel::HyperbolicDisk { .. } => {
                self.circle_outline([0.0, 0.0], 1.0, "#303030");
            }
            _ => {}
        }
    }

    pub fn finish(self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0}\" height=\"{:.0}\" viewBox=\"0 0 {:.0} {:.0}\">\n",
            self.width, self.height, self.width, self.height,
        ));
        out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
        for e in &self.body {
            out.push_str(e);
            out.push('\n');
        }
        out.push_str("</svg>\n");
        out
    }
}

/// Distinguishable fills for component shading.
pub const PALETTE: [&str; 6] = [
    "#9ecae9", "#ffbe7d", "#8cd17d", "#ff9d9a", "#d4a6c8", "#86bcb6",
];
