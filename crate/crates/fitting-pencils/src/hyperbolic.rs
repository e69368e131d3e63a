//! Upper half-plane model of `H²` and its unit tangent bundle `T¹H² ≅ SL(2,R)`.
//!
//! A frame `g` stands for the unit vector `dg_i(∂_y)` at `g·i`; the geodesic
//! flow is right multiplication by `a_t = diag(e^{t/2}, e^{-t/2})`.

use crate::linalg::Mat;
use nalgebra::Complex;
use std::f64::consts::FRAC_PI_2;

pub type C64 = Complex<f64>;

/// Point of `∂H² = RP¹` as a homogeneous pair `[x : y]`; `z ↔ [z : 1]`, `∞ ↔ [1 : 0]`.
pub type BoundaryPoint = [f64; 2];

/// Unit tangent vector: base point in the upper half-plane and Euclidean
/// angle of the direction (the hyperbolic norm is one by construction).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitTangent {
    pub x: C64,
    pub angle: f64,
}

pub fn mobius(g: &Mat, z: C64) -> C64 {
    (z * g[(0, 0)] + g[(0, 1)]) / (z * g[(1, 0)] + g[(1, 1)])
}

/// Derivative of `z ↦ g·z`.
pub fn mobius_derivative(g: &Mat, z: C64) -> C64 {
    let d = z * g[(1, 0)] + g[(1, 1)];
    C64::new(1.0, 0.0) / (d * d)
}

/// `k_θ`, fixing `i` and rotating tangents there by `2θ`.
pub fn rotation(theta: f64) -> Mat {
    let (s, c) = theta.sin_cos();
    Mat::from_row_slice(2, 2, &[c, s, -s, c])
}

pub fn geodesic_matrix(t: f64) -> Mat {
    Mat::from_row_slice(2, 2, &[(t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()])
}

/// `[[√y, x/√y], [0, 1/√y]]`: sends `i` to `x + iy` with real positive derivative.
pub fn translation_to(z: C64) -> Mat {
    let r = z.im.sqrt();
    Mat::from_row_slice(2, 2, &[r, z.re / r, 0.0, 1.0 / r])
}

pub fn frame_of(u: &UnitTangent) -> Mat {
    translation_to(u.x) * rotation((u.angle - FRAC_PI_2) / 2.0)
}

pub fn tangent_of(g: &Mat) -> UnitTangent {
    let i = C64::new(0.0, 1.0);
    let x = mobius(g, i);
    let angle = FRAC_PI_2 + mobius_derivative(g, i).arg();
    UnitTangent { x, angle: angle.rem_euclid(std::f64::consts::TAU) }
}

/// Geodesic flow for time `t`.
pub fn flow(u: &UnitTangent, t: f64) -> UnitTangent {
    tangent_of(&(frame_of(u) * geodesic_matrix(t)))
}

/// Forward endpoint of the geodesic through `u`.
pub fn forward_endpoint(u: &UnitTangent) -> BoundaryPoint {
    let g = frame_of(u);
    [g[(0, 0)], g[(1, 0)]]
}

pub fn backward_endpoint(u: &UnitTangent) -> BoundaryPoint {
    let g = frame_of(u);
    [g[(0, 1)], g[(1, 1)]]
}

/// `g·u`.
pub fn act(g: &Mat, u: &UnitTangent) -> UnitTangent {
    tangent_of(&(g * frame_of(u)))
}

pub fn act_boundary(g: &Mat, p: &BoundaryPoint) -> BoundaryPoint {
    [g[(0, 0)] * p[0] + g[(0, 1)] * p[1], g[(1, 0)] * p[0] + g[(1, 1)] * p[1]]
}

pub fn distance(z: C64, w: C64) -> f64 {
    let d = (z - w).norm_sqr();
    (1.0 + d / (2.0 * z.im * w.im)).acosh()
}

/// Cyclic order of three boundary points: `+1` counterclockwise (increasing
/// along `R` then through `∞`), `-1` clockwise.
pub fn cyclic_orientation(a: &BoundaryPoint, b: &BoundaryPoint, c: &BoundaryPoint) -> f64 {
    let det = |p: &BoundaryPoint, q: &BoundaryPoint| p[0] * q[1] - p[1] * q[0];
    // with representatives y ≥ 0, z ↦ [z:1] increasing corresponds to det < 0
    let norm = |p: &BoundaryPoint| if p[1] < 0.0 || (p[1] == 0.0 && p[0] < 0.0) { [-p[0], -p[1]] } else { *p };
    let (a, b, c) = (norm(a), norm(b), norm(c));
    let s = -(det(&a, &b).signum() + det(&b, &c).signum() + det(&c, &a).signum());
    s.signum()
}

/// Attracting fixed point on `RP¹` of a hyperbolic `g`.
pub fn attracting_fixed_point(g: &Mat) -> BoundaryPoint {
    let eig = nalgebra::Matrix2::new(g[(0, 0)], g[(0, 1)], g[(1, 0)], g[(1, 1)]);
    let tr = eig.trace();
    let disc = (tr * tr - 4.0 * eig.determinant()).max(0.0).sqrt();
    let lam = if tr >= 0.0 { 0.5 * (tr + disc) } else { 0.5 * (tr - disc) };
    // (g - λ) v = 0
    let (a, b) = (g[(0, 0)] - lam, g[(0, 1)]);
    let (c, d) = (g[(1, 0)], g[(1, 1)] - lam);
    let v = if a.abs() + b.abs() > c.abs() + d.abs() { [b, -a] } else { [d, -c] };
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    [v[0] / n, v[1] / n]
}
