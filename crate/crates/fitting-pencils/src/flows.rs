//! Fitting flows realized by the hyperbolic geodesic flow: averaged pencils
//! of boundary quadrics, Gauss maps of totally geodesic planes, nestedness,
//! contraction, winding and fibration audits, and the symmetric space of
//! `Sp(2n,R)` inside the cone of positive tensors.

use crate::error::{Error, Result};
use crate::hyperbolic::{self, UnitTangent, C64};
use crate::linalg::{self, Mat, Vct};
use crate::nesting::{self, NestedPair};
use crate::pencils::{self, Pencil};
use crate::quadrics::{Quadric, EIG_TOL};
use crate::reps::{Embedding, FuchsianRep};
use crate::status::Status;
use crate::symplectic::{self, Lagrangian};
pub use crate::linalg::geometric_mean;
pub use crate::symplectic::sp_retract;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    /// `q_v = ∫ ⟨v, w⟩ q_{ℓ_{Jw}, ℓ_{-Jw}} dw` over the unit circle at the point.
    Averaged,
    /// Derivative of the dual immersion of the totally geodesic plane `ι(SL(2,R))·I`.
    GaussGeodesic,
}

/// An `SL(2,R)`-equivariant map from `T¹H²` to quadrics, linear in the
/// tangent vector, defining a pencil at each point.
#[derive(Debug, Clone)]
pub struct PencilField {
    pub emb: Embedding,
    pub kind: FieldKind,
    pub k: usize,
    /// Quadric of the unit vector `∂_y` at `i`.
    base: Mat,
}

/// A point of the pulled-back circle bundle: a unit tangent and its quadric.
#[derive(Debug, Clone)]
pub struct FlowSample {
    pub tangent: UnitTangent,
    pub q: Mat,
}

fn standard_tangent() -> UnitTangent {
    UnitTangent { x: C64::new(0.0, 1.0), angle: FRAC_PI_2 }
}

/// `q_{ℓ_{Jw}, ℓ_{-Jw}}` for the unit tangent `w`.
fn boundary_quadric(emb: &Embedding, w: &UnitTangent) -> Result<Mat> {
    let sp = emb.space();
    let jw = UnitTangent { x: w.x, angle: w.angle + FRAC_PI_2 };
    let mjw = UnitTangent { x: w.x, angle: w.angle - FRAC_PI_2 };
    let l1 = emb.boundary_lagrangian(&hyperbolic::forward_endpoint(&jw))?;
    let l2 = emb.boundary_lagrangian(&hyperbolic::forward_endpoint(&mjw))?;
    Ok(symplectic::pair_quadric(&sp, &l1, &l2)?.mat)
}

/// `K`-node trapezoidal quadrature of `q_v`, with nodes at angles
/// `θ_k = 2π(k + 1/2)/K` measured from `v` so that nodes are transported
/// along geodesics.
pub fn averaged_quadric(emb: &Embedding, v: &UnitTangent, k: usize) -> Result<Mat> {
    if k < 64 {
        return Err(Error::Precondition("quadrature needs K ≥ 64".into()));
    }
    let d = emb.dim();
    let terms: Vec<Result<Mat>> = (0..k / 2)
        .into_par_iter()
        .map(|j| {
            let th = TAU * (j as f64 + 0.5) / k as f64;
            let w = UnitTangent { x: v.x, angle: v.angle + th };
            // the node at θ + π contributes the same term
            Ok(boundary_quadric(emb, &w)? * (2.0 * th.cos() * TAU / k as f64))
        })
        .collect();
    let mut q = Mat::zeros(d, d);
    for t in terms {
        q += t?;
    }
    Ok(linalg::symmetrize(&q))
}

impl PencilField {
    pub fn averaged(emb: &Embedding, k: usize) -> Result<Self> {
        let base = averaged_quadric(emb, &standard_tangent(), k)?;
        Ok(PencilField { emb: emb.clone(), kind: FieldKind::Averaged, k, base })
    }

    pub fn gauss(emb: &Embedding) -> Self {
        // d/dt (ι(a_t) ι(a_t)ᵀ)^{-1} at t = 0
        let y = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let base = -emb.derivative(&y);
        PencilField { emb: emb.clone(), kind: FieldKind::GaussGeodesic, k: 0, base }
    }

    pub fn dim(&self) -> usize {
        self.emb.dim()
    }

    /// `q_v`, computed by transporting the base quadric with `ι(frame(v))`.
    pub fn quadric(&self, v: &UnitTangent) -> Mat {
        let g = self.emb.apply(&hyperbolic::frame_of(v));
        let w = symplectic::standard_omega(self.emb.n);
        // g⁻¹ = ω⁻¹ gᵀ ω for symplectic g
        let gi = -(&w * g.transpose() * &w);
        linalg::symmetrize(&(gi.transpose() * &self.base * &gi))
    }

    /// `q_v` evaluated from its definition at the point of `v`.
    pub fn quadric_direct(&self, v: &UnitTangent) -> Result<Mat> {
        match self.kind {
            FieldKind::Averaged => averaged_quadric(&self.emb, v, self.k),
            FieldKind::GaussGeodesic => Ok(self.quadric(v)),
        }
    }

    /// `u(x) = span{q_{∂_y}, q_{∂_x}}` at the point `x`.
    pub fn pencil(&self, x: C64) -> Result<Pencil> {
        let a = self.quadric(&UnitTangent { x, angle: FRAC_PI_2 });
        let b = self.quadric(&UnitTangent { x, angle: 0.0 });
        Pencil::new(vec![a, b])
    }

    pub fn sample(&self, v: UnitTangent) -> FlowSample {
        FlowSample { q: self.quadric(&v), tangent: v }
    }

    /// Relative change of the base quadric when doubling the quadrature.
    pub fn richardson(&self) -> Result<f64> {
        if self.kind != FieldKind::Averaged {
            return Ok(0.0);
        }
        let q2 = averaged_quadric(&self.emb, &standard_tangent(), 2 * self.k)?;
        Ok((&q2 - &self.base).norm() / q2.norm())
    }

    /// Largest distance between `u(g·x)` and `ι(g)·u(x)` over the generators
    /// and sample points, with `u` computed directly at both points.
    pub fn equivariance_residual(&self, gens: &[Mat], points: &[C64]) -> Result<f64> {
        let mut worst = 0.0f64;
        for x in points {
            let p = self.direct_pencil(*x)?;
            for g in gens {
                let gx = hyperbolic::mobius(g, *x);
                let lhs = self.direct_pencil(gx)?;
                let rhs = p.act(&self.emb.apply(g))?;
                worst = worst.max(lhs.distance(&rhs));
            }
        }
        Ok(worst)
    }

    fn direct_pencil(&self, x: C64) -> Result<Pencil> {
        let a = self.quadric_direct(&UnitTangent { x, angle: FRAC_PI_2 })?;
        let b = self.quadric_direct(&UnitTangent { x, angle: 0.0 })?;
        Pencil::new(vec![a, b])
    }
}

/// Averaged pencil at `x` computed by quadrature at `x` itself.
pub fn averaged_pencil(emb: &Embedding, x: C64, k: usize) -> Result<Pencil> {
    if !(x.im > 0.0) {
        return Err(Error::Precondition("point must lie in the upper half-plane".into()));
    }
    let a = averaged_quadric(emb, &UnitTangent { x, angle: FRAC_PI_2 }, k)?;
    let b = averaged_quadric(emb, &UnitTangent { x, angle: 0.0 }, k)?;
    Pencil::new(vec![a, b])
}

/// Geodesic flow on the circle bundle: move the tangent, then read off the
/// quadric of the new tangent.
pub fn geodesic_flow_step(s: &FlowSample, field: &PencilField, t: f64) -> FlowSample {
    field.sample(hyperbolic::flow(&s.tangent, t))
}

/// `λ_min(q_new − q_old)` as given, and after unit Frobenius normalization
/// with the best positive rescaling `c ∈ [e^{-5}, e^5]` of `q_new`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NestedMargin {
    pub raw: f64,
    pub scaled: f64,
    pub scale: f64,
}

pub fn nested_margin(q_old: &Mat, q_new: &Mat) -> NestedMargin {
    let raw = linalg::lambda_min(&(q_new - q_old)).0;
    let a = q_old / q_old.norm();
    let b = q_new / q_new.norm();
    let f = |s: f64| linalg::lambda_min(&(&b * s.exp() - &a)).0;
    let (mut lo, mut hi) = (-5.0f64, 5.0f64);
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    let s = 0.5 * (lo + hi);
    NestedMargin { raw, scaled: f(s), scale: s.exp() }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub times: Vec<f64>,
    pub log_cr: Vec<f64>,
    /// Largest `α` with `log cr(t) ≥ α(t − 1)` on the grid.
    pub alpha: f64,
    pub ls_slope: f64,
    /// Worst relative deviation of `log cr` from its least-squares line on `t ≥ 1`.
    pub linearity: f64,
    /// Smallest `log cr(t_{j+1}, 0) − log cr(t_{j+1}, t_j) − log cr(t_j, 0)`.
    pub superadditivity: f64,
    pub min_nested_margin: f64,
}

/// Cross ratios `cr(π(Φ_t q), π(q))` along the flow line of `start`.
pub fn contraction_audit(field: &PencilField, start: &UnitTangent, tgrid: &[f64], budget: usize, seed: u64) -> Result<ContractionReport> {
    let q0 = field.quadric(start);
    let qs: Vec<Mat> = tgrid.iter().map(|&t| field.quadric(&hyperbolic::flow(start, t))).collect();
    let mut min_margin = f64::INFINITY;
    let mut log_cr = Vec::with_capacity(tgrid.len());
    for (j, q) in qs.iter().enumerate() {
        let m = nested_margin(&q0, q);
        min_margin = min_margin.min(m.raw / q.norm());
        if m.raw <= 0.0 {
            return Err(Error::Precondition(format!("flow not nested at t = {}", tgrid[j])));
        }
        let pair = NestedPair::new(Quadric::new(q0.clone())?, Quadric::new(q.clone())?)?;
        log_cr.push(nesting::cross_ratio_distance(&pair, budget, linalg::substream(seed, j as u64))?.value.ln());
    }
    let mut sup = f64::INFINITY;
    for j in 0..tgrid.len().saturating_sub(1) {
        let pair = NestedPair::new(Quadric::new(qs[j].clone())?, Quadric::new(qs[j + 1].clone())?)?;
        let step = nesting::cross_ratio_distance(&pair, budget, linalg::substream(seed ^ 0x77, j as u64))?.value.ln();
        sup = sup.min(log_cr[j + 1] - step - log_cr[j]);
    }
    let alpha = tgrid
        .iter()
        .zip(&log_cr)
        .filter(|(t, _)| **t > 1.0)
        .map(|(t, l)| l / (t - 1.0))
        .fold(f64::INFINITY, f64::min);
    let (xs, ys): (Vec<f64>, Vec<f64>) = tgrid.iter().zip(&log_cr).filter(|(t, _)| **t >= 1.0).map(|(t, l)| (*t, *l)).unzip();
    let (a, b) = if xs.len() >= 2 { linalg::least_squares_line(&xs, &ys) } else { (0.0, 0.0) };
    let top = ys.iter().fold(0.0f64, |m, y| m.max(y.abs())).max(1e-300);
    let linearity = xs.iter().zip(&ys).map(|(x, y)| (y - a - b * x).abs() / top).fold(0.0, f64::max);
    Ok(ContractionReport { times: tgrid.to_vec(), log_cr, alpha, ls_slope: b, linearity, superadditivity: sup, min_nested_margin: min_margin })
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub limit: nesting::LimitSubspace,
    /// Largest principal angle to `ξ` at the geodesic endpoint.
    pub angle: f64,
    pub forward: bool,
}

/// Limit subspace of `{q_{Φ_t v} ≤ 0}` for `t ∈ [0, tmax]` compared with the
/// boundary Lagrangian of the forward endpoint; with `forward = false` uses
/// `−q_{Φ_{−t} v}` and the backward endpoint.
pub fn limit_audit(field: &PencilField, start: &UnitTangent, tmax: f64, steps: usize, forward: bool, seed: u64) -> Result<LimitReport> {
    let sign = if forward { 1.0 } else { -1.0 };
    let seq: Vec<Quadric> = (0..=steps)
        .map(|j| {
            let t = tmax * j as f64 / steps as f64;
            Quadric { dim: field.dim(), mat: field.quadric(&hyperbolic::flow(start, sign * t)) * sign }
        })
        .collect();
    let limit = nesting::limit_subspace(&seq, 1e-13, 6000, seed)?;
    let end = if forward { hyperbolic::forward_endpoint(start) } else { hyperbolic::backward_endpoint(start) };
    let xi = field.emb.boundary_lagrangian(&end)?;
    let angles = linalg::principal_angles(&limit.frame, &xi.frame);
    let mut angle = angles.iter().fold(0.0f64, |a, &b| a.max(b));
    if limit.dim != xi.n() {
        angle = FRAC_PI_2;
    }
    Ok(LimitReport { limit, angle, forward })
}

/// Orthogonal projector of `S²V` onto the pencil in isometric coordinates.
fn pencil_projector(p: &Pencil) -> Mat {
    let e: Vec<Vct> = p.orthonormal_basis().iter().map(linalg::sym_to_vec).collect();
    let f = Mat::from_columns(&e);
    &f * f.transpose()
}

/// Singular values of the derivative of `x ↦ field.pencil(x)` at `x` along
/// the two hyperbolic unit directions, by central differences of the
/// pencil projector with relative step `h`. Two values above rounding mean
/// the averaged map has full rank there; nothing is concluded globally.
pub fn pencil_map_singular_values(field: &PencilField, x: C64, h: f64) -> Result<[f64; 2]> {
    if !(h > 0.0) || x.im <= 0.0 {
        return Err(Error::Precondition("need a point of the upper half-plane and a positive step".into()));
    }
    let step = h * x.im;
    let diff = |dz: C64| -> Result<Vct> {
        let plus = pencil_projector(&field.pencil(x + dz)?);
        let minus = pencil_projector(&field.pencil(x - dz)?);
        let d = (plus - minus) / (2.0 * h);
        Ok(Vct::from_column_slice(d.as_slice()))
    };
    let jac = Mat::from_columns(&[diff(C64::new(step, 0.0))?, diff(C64::new(0.0, step))?]);
    let sv = jac.singular_values();
    Ok([sv[0].max(sv[1]), sv[0].min(sv[1])])
}

/// Flow time for limit audits: the eigenvalues of `q_t` spread like
/// `e^{±wt}` with `w = 2n − 1` (irreducible) or `w = 1` (diagonal), and past
/// a spread of about `e^{60}` the negative block is lost to rounding.
pub fn limit_horizon(emb: &Embedding) -> f64 {
    match emb.kind {
        crate::reps::EmbeddingKind::Irreducible => (30.0 / (2 * emb.n - 1) as f64).min(20.0),
        crate::reps::EmbeddingKind::Diagonal => 20.0,
    }
}

/// Winding around `x` of `θ ↦ p(Φ_t(q_θ))` over the fiber circle.
pub fn winding_audit(x: C64, t_small: f64, k: usize, reversed: bool) -> Result<i64> {
    if !(t_small > 0.0) || k < 8 {
        return Err(Error::Precondition("need t > 0 and at least 8 fiber samples".into()));
    }
    let pts: Vec<C64> = (0..k)
        .map(|j| {
            let s = TAU * j as f64 / k as f64;
            let th = if reversed { -s } else { s };
            hyperbolic::flow(&UnitTangent { x, angle: th }, t_small).x - x
        })
        .collect();
    if pts.iter().any(|p| p.norm() < 1e-14) {
        return Err(Error::Precondition("degenerate projected circle; decrease t".into()));
    }
    let mut total = 0.0;
    for j in 0..k {
        total += (pts[(j + 1) % k] / pts[j]).arg();
    }
    Ok((total / TAU).round() as i64)
}

/// Winding audit through a field: fiber samples are the quadrics `q_θ` of
/// the pencil at `x`, mapped back to tangent directions through `v ↦ q_v`.
pub fn field_winding_audit(field: &PencilField, x: C64, t_small: f64, k: usize) -> Result<i64> {
    let p = field.pencil(x)?;
    let (a, b) = (&p.basis[0], &p.basis[1]);
    let mut pts = Vec::with_capacity(k);
    for j in 0..k {
        let s = TAU * j as f64 / k as f64;
        let q = a * s.cos() + b * s.sin();
        // q = q_v for v at angle π/2 − s, by linearity of v ↦ q_v
        let c = p.coordinates(&q);
        let angle = FRAC_PI_2 - c[1].atan2(c[0]);
        pts.push(hyperbolic::flow(&UnitTangent { x, angle }, t_small).x - x);
    }
    let mut total = 0.0;
    for j in 0..k {
        total += (pts[(j + 1) % k] / pts[j]).arg();
    }
    Ok((total / TAU).round() as i64)
}

/// Tangent data of the dual immersion along `t ↦ diag(e^{tλ_i})`.
#[derive(Debug, Clone, Serialize)]
pub struct GaussGeodesic {
    #[serde(with = "crate::io::mat_rows")]
    pub q: Mat,
    #[serde(with = "crate::io::mat_rows")]
    pub derivative: Mat,
    /// Derivative positive definite.
    pub fitting: Status,
}

/// `q_t = Σ −λ_i e^{−tλ_i} e_i*²` and `q_t' = Σ λ_i² e^{−tλ_i} e_i*²`.
pub fn gauss_map_geodesic(lambda: &[f64], t: f64) -> Result<GaussGeodesic> {
    let s: f64 = lambda.iter().sum();
    let scale = lambda.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if s.abs() > 1e-12 * scale.max(1.0) || lambda.is_empty() {
        return Err(Error::Precondition("eigen-data must sum to zero".into()));
    }
    let q = Mat::from_diagonal(&Vct::from_iterator(lambda.len(), lambda.iter().map(|l| -l * (-t * l).exp())));
    let derivative = Mat::from_diagonal(&Vct::from_iterator(lambda.len(), lambda.iter().map(|l| l * l * (-t * l).exp())));
    let lmin = linalg::lambda_min(&derivative).0;
    let top = linalg::spectral_norm(&derivative).max(1e-300);
    Ok(GaussGeodesic { q, derivative, fitting: Status::from_bool(lmin > EIG_TOL * top) })
}

/// Central-difference derivative of `t ↦ q_t`.
pub fn gauss_map_fd(lambda: &[f64], t: f64, h: f64) -> Result<Mat> {
    let a = gauss_map_geodesic(lambda, t + h)?.q;
    let b = gauss_map_geodesic(lambda, t - h)?.q;
    Ok((a - b) / (2.0 * h))
}

/// Positive tensor compatible with `ω`: `(Xω)² = −I`.
#[derive(Debug, Clone)]
pub struct SpPoint {
    pub x: Mat,
}

impl SpPoint {
    pub fn new(x: Mat) -> Result<Self> {
        let r = sp_membership(&x)?;
        if r > 1e-9 {
            return Err(Error::Precondition(format!("membership residual {r:.3e}")));
        }
        Ok(SpPoint { x })
    }
}

fn require_pd(x: &Mat) -> Result<()> {
    let l = linalg::lambda_min(x).0;
    if !(l > 0.0) {
        return Err(Error::NotPositiveDefinite(l));
    }
    Ok(())
}

/// `‖(Xω)² + I‖`.
pub fn sp_membership(x: &Mat) -> Result<f64> {
    require_pd(x)?;
    let w = symplectic::standard_omega(x.nrows() / 2);
    let m = x * &w;
    Ok((&m * &m + Mat::identity(x.nrows(), x.nrows())).norm())
}

/// Basis `[[A, B], [B, −A]]` (A, B symmetric) of the symmetric part of `sp(2n)`.
pub fn sp_symmetric_basis(n: usize) -> Vec<Mat> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            let mut e = Mat::zeros(n, n);
            let c = if i == j { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
            e[(i, j)] = c;
            e[(j, i)] = c;
            let mut a = Mat::zeros(2 * n, 2 * n);
            a.view_mut((0, 0), (n, n)).copy_from(&e);
            a.view_mut((n, n), (n, n)).copy_from(&(-&e));
            let mut b = Mat::zeros(2 * n, 2 * n);
            b.view_mut((0, n), (n, n)).copy_from(&e);
            b.view_mut((n, 0), (n, n)).copy_from(&e);
            out.push(a);
            out.push(b);
        }
    }
    out
}

/// `{X^{1/2} S X^{1/2}}` for the symmetric `sp(2n)` basis.
pub fn sp_tangent_frame(x: &Mat) -> Result<Vec<Mat>> {
    require_pd(x)?;
    let (s, _) = linalg::sqrt_and_inv_sqrt(x);
    Ok(sp_symmetric_basis(x.nrows() / 2).iter().map(|b| linalg::symmetrize(&(&s * b * &s))).collect())
}

#[derive(Debug, Clone)]
pub struct TangentRegularity {
    pub status: Status,
    /// Eigenvalues `±λ_i` of the normal form.
    pub lambdas: Vec<f64>,
    pub witnesses: Option<(Lagrangian, Lagrangian)>,
}

/// ω-regularity of the quadric `X^{-1} V X^{-1}` attached to the tangent
/// vector `V` at `X`; its positive and negative eigenspaces (read at the
/// base point) are Lagrangian.
pub fn tangent_regularity(x: &Mat, v: &Mat) -> Result<TangentRegularity> {
    require_pd(x)?;
    let (s, si) = linalg::sqrt_and_inv_sqrt(x);
    // S = X^{-1/2} V X^{-1/2} ∈ sp ∩ Sym, q = X^{-1/2}·S
    let sm = linalg::symmetrize(&(&si * v * &si));
    let w = symplectic::standard_omega(x.nrows() / 2);
    let defect = (&sm * &w + &w * &sm).norm();
    if defect > 1e-8 * sm.norm().max(1e-300) {
        return Err(Error::Precondition(format!("not tangent to X_Sp (residual {defect:.3e})")));
    }
    let (ev, vecs) = linalg::sym_eigen(&sm);
    let d = ev.len();
    let n = d / 2;
    let top = ev.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(1e-300);
    let small = ev.iter().fold(f64::INFINITY, |a, x| a.min(x.abs()));
    let lambdas: Vec<f64> = ev.iter().copied().collect();
    if small <= EIG_TOL * top {
        return Ok(TangentRegularity { status: Status::False, lambdas, witnesses: None });
    }
    // the quadric is q = X^{-1/2} S X^{-1/2}; u ↦ X^{1/2} u carries eigenspaces of S
    let pos = Lagrangian { frame: linalg::orthonormalize(&(&s * vecs.columns(n, n))) };
    let neg = Lagrangian { frame: linalg::orthonormalize(&(&s * vecs.columns(0, n))) };
    Ok(TangentRegularity { status: Status::True, lambdas, witnesses: Some((pos, neg)) })
}

#[derive(Debug, Clone)]
pub struct TransversalityReport {
    pub status: Status,
    pub point: Option<Mat>,
    /// Normalized `max_i |Tr(q_i X)|` at the point.
    pub residual: f64,
    /// Smallest singular value of `[T_X X_Sp | P°]` in orthonormal frames.
    pub gap: f64,
    pub rank: usize,
}

/// Finds `X ∈ X_Sp` with `Tr(qX) = 0` for all `q ∈ P` by Gauss–Newton steps
/// `X ← X^{1/2} exp(S) X^{1/2}` along `X_Sp`, then checks that the tangent
/// spaces span `S²V`.
pub fn transversality_audit(p: &Pencil, start: Option<&Mat>) -> Result<TransversalityReport> {
    let d = p.dim;
    let n = d / 2;
    let qs = p.orthonormal_basis();
    let mut x = match start {
        Some(s) => sp_retract(s)?,
        None => Mat::identity(d, d),
    };
    let resid = |x: &Mat| -> Vct { Vct::from_iterator(qs.len(), qs.iter().map(|q| linalg::trace_pair(q, x) / x.norm())) };
    let basis = sp_symmetric_basis(n);
    let mut r = resid(&x);
    for _ in 0..200 {
        if r.norm() < 1e-13 {
            break;
        }
        let (s, _) = linalg::sqrt_and_inv_sqrt(&x);
        let tang: Vec<Mat> = basis.iter().map(|b| &s * b * &s).collect();
        let jac = Mat::from_fn(qs.len(), basis.len(), |i, k| linalg::trace_pair(&qs[i], &tang[k]) / x.norm());
        let Ok(step) = jac.clone().svd(true, true).solve(&(-&r), 1e-14) else {
            break;
        };
        let mut h = 1.0;
        let mut improved = false;
        while h > 1e-8 {
            let mut a = Mat::zeros(d, d);
            for (b, c) in basis.iter().zip(step.iter()) {
                a += b * (c * h);
            }
            let xn = linalg::symmetrize(&(&s * linalg::expm(&a) * &s));
            let rn = resid(&xn);
            if rn.norm() < r.norm() {
                x = xn;
                r = rn;
                improved = true;
                break;
            }
            h *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if r.norm() > 1e-10 {
        return Ok(TransversalityReport { status: Status::Inconclusive, point: None, residual: r.norm(), gap: 0.0, rank: 0 });
    }
    let tang = sp_tangent_frame(&x)?;
    let ann: Vec<Mat> = pencils::annihilator(p).into_iter().map(|t| t.mat).collect();
    let tv: Vec<Vct> = linalg::sym_span_basis(&tang, 1e-12).iter().map(linalg::sym_to_vec).collect();
    let av: Vec<Vct> = ann.iter().map(linalg::sym_to_vec).collect();
    let mut cols = tv;
    cols.extend(av);
    let m = Mat::from_columns(&cols);
    let sv = linalg::singular_values(&m);
    let full = linalg::sym_dim(d);
    let rank = sv.iter().filter(|&&s| s > 1e-8 * sv[0]).count();
    let gap = if sv.len() >= full { sv[full - 1] } else { 0.0 };
    Ok(TransversalityReport { status: Status::from_bool(rank >= full), point: Some(x), residual: r.norm(), gap, rank })
}

#[derive(Debug, Clone, Serialize)]
pub struct FibrationReport {
    pub status: Status,
    /// Number of interior samples hitting `k` fibers, indexed by `k`.
    pub interior_histogram: Vec<usize>,
    pub limit_histogram: Vec<usize>,
    pub region_radius: f64,
    /// Worst normalized residual among accepted fiber roots.
    pub root_residual: f64,
}

/// Fibers through the tensor `t`: points `x` of the hyperbolic disk of radius
/// `radius` about `i` with `Tr(q t) = 0` for all `q ∈ u(x)`, found by Newton
/// iterations from a polar mesh and deduplicated.
pub fn fibers_through(field: &PencilField, t: &Mat, radius: f64) -> (Vec<C64>, f64) {
    let tn = t / t.norm();
    let eval = |z: [f64; 2]| -> [f64; 2] {
        let x = C64::new(z[0], z[1].exp());
        let a = field.quadric(&UnitTangent { x, angle: FRAC_PI_2 });
        let b = field.quadric(&UnitTangent { x, angle: 0.0 });
        [linalg::trace_pair(&a, &tn) / a.norm(), linalg::trace_pair(&b, &tn) / b.norm()]
    };
    let mut roots: Vec<C64> = Vec::new();
    let mut worst = 0.0f64;
    let i = C64::new(0.0, 1.0);
    let rings = (radius / 0.5).ceil() as usize + 1;
    let mut seeds = vec![i];
    for r in 1..rings {
        let rr = radius * r as f64 / (rings - 1) as f64;
        let m = 8 * r;
        for k in 0..m {
            seeds.push(hyperbolic::flow(&UnitTangent { x: i, angle: TAU * k as f64 / m as f64 }, rr).x);
        }
    }
    for s in seeds {
        let mut z = [s.re, s.im.ln()];
        let mut f = eval(z);
        let mut ok = false;
        for _ in 0..60 {
            let fnorm = f[0].hypot(f[1]);
            if fnorm < 1e-12 {
                ok = true;
                break;
            }
            let h = 1e-7;
            let f1 = eval([z[0] + h, z[1]]);
            let f2 = eval([z[0], z[1] + h]);
            let j = [[(f1[0] - f[0]) / h, (f2[0] - f[0]) / h], [(f1[1] - f[1]) / h, (f2[1] - f[1]) / h]];
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            if det.abs() < 1e-300 {
                break;
            }
            let dz = [(j[1][1] * f[0] - j[0][1] * f[1]) / det, (-j[1][0] * f[0] + j[0][0] * f[1]) / det];
            let mut lam = 1.0;
            let mut moved = false;
            while lam > 1e-6 {
                let zn = [z[0] - lam * dz[0], z[1] - lam * dz[1]];
                if zn[1].abs() > radius + 3.0 || zn[0].abs() > 2.0 * zn[1].abs().exp() + 3.0 {
                    lam *= 0.5;
                    continue;
                }
                let fnew = eval(zn);
                if fnew[0].hypot(fnew[1]) < fnorm {
                    z = zn;
                    f = fnew;
                    moved = true;
                    break;
                }
                lam *= 0.5;
            }
            if !moved {
                break;
            }
        }
        if !ok {
            continue;
        }
        let x = C64::new(z[0], z[1].exp());
        if hyperbolic::distance(x, i) > radius {
            continue;
        }
        worst = worst.max(f[0].hypot(f[1]));
        if roots.iter().all(|r| hyperbolic::distance(*r, x) > 1e-5) {
            roots.push(x);
        }
    }
    (roots, worst)
}

/// Interior positive tensors `ι(g_y) e^{S} ι(g_y)ᵀ` with `d(i, y) ≤ radius − 1`
/// should lie on exactly one fiber; rank-one tensors on `ξ(ζ)` for fixed
/// points `ζ` of group elements on none.
pub fn fibration_audit(field: &PencilField, rep: &FuchsianRep, interior: usize, limit: usize, seed: u64) -> Result<FibrationReport> {
    let radius = 3.0;
    let d = field.dim();
    let interior_counts: Vec<(usize, f64)> = (0..interior)
        .into_par_iter()
        .map(|j| {
            let mut rng = linalg::rng(linalg::substream(seed, j as u64));
            let r = rng.random_range(0.0..radius - 1.0);
            let y = hyperbolic::flow(&UnitTangent { x: C64::new(0.0, 1.0), angle: rng.random_range(0.0..TAU) }, r).x;
            let g = field.emb.apply(&hyperbolic::translation_to(y));
            let s = linalg::random_symmetric(&mut rng, d) * 0.05;
            let t = linalg::symmetrize(&(&g * linalg::expm(&s) * g.transpose()));
            let (roots, res) = fibers_through(field, &t, radius);
            (roots.len(), res)
        })
        .collect();
    let words = rep.reduced_words(4);
    let limit_counts: Vec<(usize, f64)> = (0..limit)
        .into_par_iter()
        .map(|j| -> Result<(usize, f64)> {
            let mut rng = linalg::rng(linalg::substream(seed ^ 0xf1b, j as u64));
            let w = &words[rng.random_range(1..words.len())];
            let zeta = hyperbolic::attracting_fixed_point(&rep.word(w));
            let xi = field.emb.boundary_lagrangian(&zeta)?;
            let c = linalg::unit_vector(&mut rng, xi.n());
            let p = &xi.frame * c;
            let (roots, res) = fibers_through(field, &(&p * p.transpose()), radius);
            Ok((roots.len(), res))
        })
        .collect::<Result<Vec<_>>>()?;
    let hist = |c: &[(usize, f64)]| {
        let m = c.iter().map(|x| x.0).max().unwrap_or(0);
        let mut h = vec![0; m + 1];
        for x in c {
            h[x.0] += 1;
        }
        h
    };
    let ih = hist(&interior_counts);
    let lh = hist(&limit_counts);
    let ok = interior_counts.iter().all(|c| c.0 == 1) && limit_counts.iter().all(|c| c.0 == 0);
    let res = interior_counts.iter().chain(&limit_counts).map(|c| c.1).fold(0.0, f64::max);
    Ok(FibrationReport { status: Status::from_bool(ok), interior_histogram: ih, limit_histogram: lh, region_radius: radius, root_residual: res })
}

/// Transport sign check inside the averaged flow: for `w` with `⟨w, v⟩ ≠ 0`,
/// `q°_{φ(w)} − q°_w` is positive definite when `⟨w, v⟩ > 0` and negative
/// definite when `⟨w, v⟩ < 0`, where `φ` is transport along the geodesic of `v`.
pub fn transport_sign_margin(emb: &Embedding, v: &UnitTangent, offset: f64, t: f64) -> Result<f64> {
    let w = UnitTangent { x: v.x, angle: v.angle + offset };
    let v2 = hyperbolic::flow(v, t);
    let w2 = UnitTangent { x: v2.x, angle: v2.angle + offset };
    let d = boundary_quadric(emb, &w2)? - boundary_quadric(emb, &w)?;
    let s = offset.cos().signum();
    Ok(linalg::lambda_min(&(d * s)).0)
}

/// Random unit tangent with base point in the disk of radius `r` about `i`.
pub fn random_tangent<R: Rng + ?Sized>(rng: &mut R, r: f64) -> UnitTangent {
    let i = C64::new(0.0, 1.0);
    let x = hyperbolic::flow(&UnitTangent { x: i, angle: rng.random_range(0.0..TAU) }, rng.random_range(0.0..r)).x;
    UnitTangent { x, angle: rng.random_range(0.0..TAU) }
}

/// `λ_min(field(Φ_t v) − field(v))` over random samples and times, measured
/// in the frame of `v` (conjugated by `ι(frame(v))`) so that far base points
/// keep their conditioning, relative to `‖field(v)‖` in that frame.
pub fn nestedness_audit<R: Rng + ?Sized>(field: &PencilField, rng: &mut R, samples: usize, times: &[f64]) -> f64 {
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let v = random_tangent(rng, 2.0);
        let g = field.emb.apply(&hyperbolic::frame_of(&v));
        let s = field.sample(v);
        let q0 = linalg::symmetrize(&(g.transpose() * &s.q * &g));
        for &t in times {
            let s2 = geodesic_flow_step(&s, field, t);
            let d = linalg::symmetrize(&(g.transpose() * (&s2.q - &s.q) * &g));
            worst = worst.min(linalg::lambda_min(&d).0 / q0.norm());
        }
    }
    worst
}

pub fn angle_between(a: f64, b: f64) -> f64 {
    linalg::wrap_angle(a - b).abs().min(PI)
}
