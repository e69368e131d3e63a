//! Deterministic SVG pictures of conics in an affine chart of `RP²`.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::models::HermitianForm;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Square window `[cx − r, cx + r] × [cy − r, cy + r]` of the chart `z = 1`,
/// sampled on a `grid × grid` lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub center: [f64; 2],
    pub radius: f64,
    pub grid: usize,
    pub size_px: u32,
}

impl Default for Chart {
    fn default() -> Self {
        Chart { center: [0.0, 0.0], radius: 2.0, grid: 200, size_px: 480 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Rendering {
    pub svg: String,
    /// Segment count per curve, in input order.
    pub segments: Vec<usize>,
    /// Indices of curves with an empty zero set in the window.
    pub omitted: Vec<usize>,
}

/// Restrict a quadric on `R^m` to the three-column frame `f`: `fᵀ q f`.
pub fn slice(q: &Mat, f: &Mat) -> Result<Mat> {
    if f.nrows() != q.nrows() || f.ncols() != 3 || !q.is_square() {
        return Err(Error::Malformed("slice needs a square quadric and a three-column frame".into()));
    }
    Ok(f.transpose() * q * f)
}

/// The circle `{z : h(z, 1) = 0}` of `CP¹` as a conic of the `(Re z, Im z)` chart.
pub fn hermitian_conic(h: &HermitianForm) -> Mat {
    let [a, d, p, q] = h.coords();
    // a|z|² + 2 Re(h₂₁ z) + d with h₂₁ = p + iq, i.e. a(x² + y²) + 2(px − qy) + d
    Mat::from_row_slice(3, 3, &[a, 0.0, p, 0.0, a, -q, p, -q, d])
}

const PALETTE: [&str; 6] = ["#1f4e79", "#a33b20", "#2e7d32", "#6a1b9a", "#b8860b", "#37474f"];

fn conic_value(m: &Mat, x: f64, y: f64) -> f64 {
    let v = [x, y, 1.0];
    let mut s = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            s += v[i] * m[(i, j)] * v[j];
        }
    }
    s
}

/// Zero-set segments of `m` by marching squares, in chart coordinates.
pub fn marching_squares(m: &Mat, chart: &Chart) -> Vec<[[f64; 2]; 2]> {
    let n = chart.grid.max(2);
    let h = 2.0 * chart.radius / n as f64;
    let x0 = chart.center[0] - chart.radius;
    let y0 = chart.center[1] - chart.radius;
    let vals: Vec<Vec<f64>> = (0..=n).map(|j| (0..=n).map(|i| conic_value(m, x0 + i as f64 * h, y0 + j as f64 * h)).collect()).collect();
    let mut out = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let c = [vals[j][i], vals[j][i + 1], vals[j + 1][i + 1], vals[j + 1][i]];
            let p = [[x0 + i as f64 * h, y0 + j as f64 * h], [x0 + (i + 1) as f64 * h, y0 + j as f64 * h], [x0 + (i + 1) as f64 * h, y0 + (j + 1) as f64 * h], [x0 + i as f64 * h, y0 + (j + 1) as f64 * h]];
            let mut cuts = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (c[e], c[(e + 1) % 4]);
                if (a < 0.0) != (b < 0.0) {
                    let t = a / (a - b);
                    let (pa, pb) = (p[e], p[(e + 1) % 4]);
                    cuts.push([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]);
                }
            }
            match cuts.len() {
                2 => out.push([cuts[0], cuts[1]]),
                4 => {
                    // saddle cell: pair the cuts by the sign at the centre
                    let mid = conic_value(m, p[0][0] + 0.5 * h, p[0][1] + 0.5 * h);
                    if (mid < 0.0) == (c[0] < 0.0) {
                        out.push([cuts[0], cuts[3]]);
                        out.push([cuts[1], cuts[2]]);
                    } else {
                        out.push([cuts[0], cuts[1]]);
                        out.push([cuts[2], cuts[3]]);
                    }
                }
                _ => {}
            }
        }
    }
    out
}

/// One stroked path per conic; output bytes depend only on the inputs.
pub fn render_conics(conics: &[Mat], chart: &Chart) -> Result<Rendering> {
    if chart.radius <= 0.0 || !chart.radius.is_finite() {
        return Err(Error::Malformed("chart radius must be positive".into()));
    }
    for m in conics {
        if m.nrows() != 3 || m.ncols() != 3 {
            return Err(Error::Malformed("conics must be 3×3".into()));
        }
    }
    let px = chart.size_px as f64;
    let to_px = |p: [f64; 2]| {
        let u = (p[0] - chart.center[0] + chart.radius) / (2.0 * chart.radius) * px;
        let v = (chart.center[1] + chart.radius - p[1]) / (2.0 * chart.radius) * px;
        (u, v)
    };
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#, chart.size_px);
    let _ = writeln!(svg, r#"<rect width="{0}" height="{0}" fill="white"/>"#, chart.size_px);
    let mut segments = Vec::with_capacity(conics.len());
    let mut omitted = Vec::new();
    for (k, m) in conics.iter().enumerate() {
        let segs = marching_squares(m, chart);
        segments.push(segs.len());
        if segs.is_empty() {
            omitted.push(k);
            let _ = writeln!(svg, "<!-- curve {k}: empty zero set in window -->");
            continue;
        }
        let mut d = String::new();
        for [a, b] in &segs {
            let (ax, ay) = to_px(*a);
            let (bx, by) = to_px(*b);
            let _ = write!(d, "M{ax:.2} {ay:.2}L{bx:.2} {by:.2}");
        }
        let _ = writeln!(svg, r#"<path d="{d}" fill="none" stroke="{}" stroke-width="1.5"/>"#, PALETTE[k % PALETTE.len()]);
    }
    svg.push_str("</svg>\n");
    Ok(Rendering { svg, segments, omitted })
}
