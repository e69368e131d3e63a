//! Two model geometries. Hermitian pencils on `C²` realize unoriented
//! geodesics of `H³`; the isomorphism `PSp(4,R) ≅ SO_o(2,3)` turns pointed
//! spacelike planes of `H^{2,2}` into maximal pencils of `R⁴`.

use crate::error::{Error, Result};
use crate::hyperbolic::C64;
use crate::linalg::{self, Mat, Vct};
use crate::pencils::{self, Pencil, TangentVector};
use crate::quadrics::{FeasibilityOptions, Quadric};
use crate::status::Status;
use crate::symplectic::{self, Lagrangian, SymplecticSpace};
use nalgebra::Matrix2;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};

/// Hermitian matrix tolerance.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Geodesics closer than this are intersecting (or asymptotic).
pub const MEET_TOL: f64 = 1e-9;

/// Geodesics farther apart than this are disjoint.
pub const DISJOINT_TOL: f64 = 1e-6;

type CMat2 = Matrix2<C64>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `2×2` complex Hermitian form `h(v, w) = v* H w`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianForm {
    pub m: CMat2,
}

impl HermitianForm {
    pub fn new(m: CMat2) -> Result<Self> {
        let scale = m.iter().fold(1.0f64, |s, z| s.max(z.norm()));
        if (m - m.adjoint()).iter().any(|z| z.norm() > HERMITIAN_TOL * scale) {
            return Err(Error::Malformed("matrix is not Hermitian".into()));
        }
        Ok(HermitianForm { m: (m + m.adjoint()) * c(0.5, 0.0) })
    }

    /// `a E₁₁ + d E₂₂ + p σ_x + q σ_y`.
    pub fn from_coords(a: f64, d: f64, p: f64, q: f64) -> Self {
        HermitianForm { m: CMat2::new(c(a, 0.0), c(p, -q), c(p, q), c(d, 0.0)) }
    }

    pub fn coords(&self) -> [f64; 4] {
        [self.m[(0, 0)].re, self.m[(1, 1)].re, self.m[(1, 0)].re, self.m[(1, 0)].im]
    }

    pub fn eval(&self, v: &[C64; 2]) -> f64 {
        let w = self.m * nalgebra::Vector2::new(v[0], v[1]);
        (v[0].conj() * w[0] + v[1].conj() * w[1]).re
    }

    pub fn det(&self) -> f64 {
        (self.m[(0, 0)] * self.m[(1, 1)] - self.m[(0, 1)] * self.m[(1, 0)]).re
    }
}

/// `v ↦ Re h(v, v)` on `R⁴ ≅ C²` in the real basis `(Re z₁, Im z₁, Re z₂, Im z₂)`.
pub fn hermitian_to_real(h: &HermitianForm) -> Quadric {
    let mut m = Mat::zeros(4, 4);
    for j in 0..2 {
        for k in 0..2 {
            let z = h.m[(j, k)];
            // Re(conj(x_j + i y_j) z (x_k + i y_k))
            m[(2 * j, 2 * k)] = z.re;
            m[(2 * j + 1, 2 * k + 1)] = z.re;
            m[(2 * j, 2 * k + 1)] = -z.im;
            m[(2 * j + 1, 2 * k)] = z.im;
        }
    }
    Quadric { dim: 4, mat: linalg::symmetrize(&m) }
}

/// Inverse of [`hermitian_to_real`]; fails off the image.
pub fn real_to_hermitian(q: &Mat) -> Result<HermitianForm> {
    if q.nrows() != 4 || q.ncols() != 4 {
        return Err(Error::Malformed("expected a 4×4 form".into()));
    }
    let mut h = CMat2::zeros();
    for j in 0..2 {
        for k in 0..2 {
            h[(j, k)] = c(0.5 * (q[(2 * j, 2 * k)] + q[(2 * j + 1, 2 * k + 1)]), 0.5 * (q[(2 * j + 1, 2 * k)] - q[(2 * j, 2 * k + 1)]));
        }
    }
    let h = HermitianForm { m: h };
    let back = hermitian_to_real(&h).mat;
    if (&back - q).norm() > 1e-9 * q.norm().max(1e-300) {
        return Err(Error::Malformed("form does not commute with the complex structure".into()));
    }
    Ok(h)
}

/// Point of `CP¹ = C ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cp1 {
    Finite { re: f64, im: f64 },
    Infinity,
}

impl Cp1 {
    pub fn finite(z: C64) -> Self {
        Cp1::Finite { re: z.re, im: z.im }
    }

    pub fn value(&self) -> Option<C64> {
        match *self {
            Cp1::Finite { re, im } => Some(c(re, im)),
            Cp1::Infinity => None,
        }
    }

    /// Unit homogeneous lift, `z ↦ [z : 1]` for `|z| ≤ 1` and `[1 : 1/z]` beyond.
    pub fn lift(&self) -> [C64; 2] {
        let v = match self.value() {
            None => [c(1.0, 0.0), c(0.0, 0.0)],
            Some(z) if z.norm() <= 1.0 => [z, c(1.0, 0.0)],
            Some(z) => [c(1.0, 0.0), c(1.0, 0.0) / z],
        };
        let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / n, v[1] / n]
    }

    pub fn from_lift(v: [C64; 2]) -> Self {
        if v[1].norm() >= v[0].norm() {
            Cp1::finite(v[0] / v[1])
        } else if v[1].norm() <= 1e-300 * v[0].norm() {
            Cp1::Infinity
        } else {
            let w = v[1] / v[0];
            Cp1::finite(c(1.0, 0.0) / w)
        }
    }

    /// Chordal distance `|u ∧ w| / (|u| |w|)`.
    pub fn chordal(&self, other: &Cp1) -> f64 {
        bracket(&self.lift(), &other.lift()).norm()
    }

    /// Parse `inf` or `re` or `re+imi`-free forms `re:im`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Cp1::Infinity);
        }
        let bad = || Error::Malformed(format!("not a point of CP¹: {s}"));
        let (re, im) = match s.split_once(':') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => (s.parse().map_err(|_| bad())?, 0.0),
        };
        Ok(Cp1::Finite { re, im })
    }
}

fn bracket(u: &[C64; 2], w: &[C64; 2]) -> C64 {
    u[0] * w[1] - u[1] * w[0]
}

/// Unoriented geodesic of `H³` given by its endpoints on `CP¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicH3 {
    pub endpoints: [Cp1; 2],
}

impl GeodesicH3 {
    pub fn new(a: Cp1, b: Cp1) -> Result<Self> {
        if a.chordal(&b) < 1e-12 {
            return Err(Error::Precondition("geodesic endpoints coincide".into()));
        }
        Ok(GeodesicH3 { endpoints: [a, b] })
    }

    /// Apply `z ↦ (αz + β)/(γz + δ)` to both endpoints.
    pub fn act(&self, g: &CMat2) -> GeodesicH3 {
        let f = |p: &Cp1| {
            let v = p.lift();
            Cp1::from_lift([g[(0, 0)] * v[0] + g[(0, 1)] * v[1], g[(1, 0)] * v[0] + g[(1, 1)] * v[1]])
        };
        GeodesicH3 { endpoints: [f(&self.endpoints[0]), f(&self.endpoints[1])] }
    }

    /// Largest chordal endpoint error against `other`, over both matchings.
    pub fn endpoint_error(&self, other: &GeodesicH3) -> f64 {
        let [a, b] = &self.endpoints;
        let [x, y] = &other.endpoints;
        a.chordal(x).max(b.chordal(y)).min(a.chordal(y).max(b.chordal(x)))
    }
}

/// `(ū₂, −ū₁)`, the Hermitian-orthogonal of `u`.
fn perp(u: &[C64; 2]) -> [C64; 2] {
    [u[1].conj(), -u[0].conj()]
}

/// `c a b* + c̄ b a*`.
fn rank_two_hermitian(a: &[C64; 2], b: &[C64; 2], cc: C64) -> CMat2 {
    let mut m = CMat2::zeros();
    for j in 0..2 {
        for k in 0..2 {
            m[(j, k)] = cc * a[j] * b[k].conj() + cc.conj() * b[j] * a[k].conj();
        }
    }
    m
}

/// The Hermitian forms vanishing at two lifts: `{c a b* + c̄ b a*}` with
/// `a ⊥ u`, `b ⊥ w`, for `c = 1` and `c = i`.
fn vanishing_basis(u: &[C64; 2], w: &[C64; 2]) -> [HermitianForm; 2] {
    let a = perp(u);
    let b = perp(w);
    [HermitianForm { m: rank_two_hermitian(&a, &b, c(1.0, 0.0)) }, HermitianForm { m: rank_two_hermitian(&a, &b, c(0.0, 1.0)) }]
}

/// Real pencil of the Hermitian forms vanishing at both endpoints.
pub fn geodesic_pencil(g: &GeodesicH3) -> Result<Pencil> {
    let [h1, h2] = vanishing_basis(&g.endpoints[0].lift(), &g.endpoints[1].lift());
    Pencil::new(vec![hermitian_to_real(&h1).mat, hermitian_to_real(&h2).mat])
}

/// Common zero locus of a Hermitian pencil: the eigenlines of `h₁⁻¹h₂`.
pub fn pencil_geodesic(p: &Pencil) -> Result<GeodesicH3> {
    if p.dim != 4 || p.d() != 2 {
        return Err(Error::Malformed("expected a plane of 4×4 forms".into()));
    }
    let h1 = real_to_hermitian(&p.basis[0])?;
    let h2 = real_to_hermitian(&p.basis[1])?;
    let inv = h1.m.try_inverse().ok_or_else(|| Error::DegenerateBasis("first form is degenerate".into()))?;
    let m = inv * h2.m;
    let tr = m[(0, 0)] + m[(1, 1)];
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    let disc = (tr * tr - det * 4.0).sqrt();
    let mut ends = Vec::with_capacity(2);
    for lam in [(tr + disc) * 0.5, (tr - disc) * 0.5] {
        if lam.im.abs() <= 1e-12 * lam.norm().max(1.0) {
            return Err(Error::Precondition("pencil has a real degenerate member; not a geodesic pencil".into()));
        }
        // kernel of M − λ from whichever row is larger
        let r0 = [m[(0, 0)] - lam, m[(0, 1)]];
        let r1 = [m[(1, 0)], m[(1, 1)] - lam];
        let r = if r0[0].norm() + r0[1].norm() >= r1[0].norm() + r1[1].norm() { r0 } else { r1 };
        ends.push(Cp1::from_lift([r[1], -r[0]]));
    }
    GeodesicH3::new(ends[0], ends[1])
}

/// Roundtrip `geodesic → pencil → geodesic`, returning the endpoint error.
pub fn pencil_geodesic_roundtrip(g: &GeodesicH3) -> Result<(Pencil, f64)> {
    let p = geodesic_pencil(g)?;
    let back = pencil_geodesic(&p)?;
    Ok((p, g.endpoint_error(&back)))
}

/// Hyperbolic distance between two geodesics from the complex distance
/// `cosh δ = (1 + r)/(1 − r)`, `r` the cross-ratio of the endpoints; zero
/// when they meet or share an endpoint.
pub fn geodesic_distance(g1: &GeodesicH3, g2: &GeodesicH3) -> f64 {
    let a = g1.endpoints[0].lift();
    let b = g1.endpoints[1].lift();
    let cc = g2.endpoints[0].lift();
    let d = g2.endpoints[1].lift();
    let num = bracket(&cc, &a) * bracket(&d, &b);
    let den = bracket(&cc, &b) * bracket(&d, &a);
    if num.norm() == 0.0 || den.norm() == 0.0 {
        return 0.0;
    }
    let r = num / den;
    let w = (c(1.0, 0.0) + r) / (c(1.0, 0.0) - r);
    w.acosh().re.abs()
}

/// Whether two geodesics are disjoint with disjoint endpoints.
pub fn geodesics_disjoint(g1: &GeodesicH3, g2: &GeodesicH3) -> (Status, f64) {
    let shared = g1.endpoints.iter().any(|a| g2.endpoints.iter().any(|b| a.chordal(b) < 1e-12));
    let d = geodesic_distance(g1, g2);
    let st = if shared || d < MEET_TOL {
        Status::False
    } else if d > DISJOINT_TOL {
        Status::True
    } else {
        Status::Inconclusive
    };
    (st, d)
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicCrosscheck {
    pub disjoint: Status,
    pub distance: f64,
    pub fitting: Status,
    pub primal_margin: f64,
    pub agree: Status,
}

/// Disjointness in `H³` against the fitting test of the two real pencils.
pub fn geodesics_fitting_crosscheck(g1: &GeodesicH3, g2: &GeodesicH3, opts: &FeasibilityOptions) -> Result<GeodesicCrosscheck> {
    let (disjoint, distance) = geodesics_disjoint(g1, g2);
    let rep = pencils::fitting_pair(&geodesic_pencil(g1)?, &geodesic_pencil(g2)?, opts)?;
    let primal_margin = rep.feasibility.as_ref().map(|f| f.primal_margin).unwrap_or(f64::NAN);
    let agree = if disjoint.is_decided() && rep.fitting.is_decided() { Status::from_bool(disjoint == rep.fitting) } else { Status::Inconclusive };
    Ok(GeodesicCrosscheck { disjoint, distance, fitting: rep.fitting, primal_margin, agree })
}

/// Random point of `CP¹` (a standard Gaussian in the affine chart).
pub fn random_cp1<R: Rng + ?Sized>(rng: &mut R) -> Cp1 {
    Cp1::finite(c(linalg::gaussian(rng), linalg::gaussian(rng)))
}

/// Random element of `SL(2,C)` near the identity scale `spread`.
pub fn random_sl2c<R: Rng + ?Sized>(rng: &mut R, spread: f64) -> CMat2 {
    let mut m = CMat2::from_fn(|_, _| c(linalg::gaussian(rng), linalg::gaussian(rng)) * spread);
    m += CMat2::identity();
    let det = m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)];
    m * (c(1.0, 0.0) / det.sqrt())
}

/// How a random pair of geodesics is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    /// Four independent endpoints: disjoint almost surely.
    Generic,
    /// Two geodesics through a common point.
    Meeting,
    /// Four concyclic endpoints, linked or not with equal odds.
    Coplanar,
    SharedEndpoint,
}

pub fn random_geodesic_pair<R: Rng + ?Sized>(rng: &mut R, kind: PairKind) -> (GeodesicH3, GeodesicH3) {
    loop {
        let g = random_sl2c(rng, 0.6);
        let pair = match kind {
            PairKind::Generic => (random_cp1(rng), random_cp1(rng), random_cp1(rng), random_cp1(rng)),
            PairKind::Meeting => {
                // geodesics through j have antipodal endpoints w, −1/w̄
                let w1 = c(linalg::gaussian(rng), linalg::gaussian(rng));
                let w2 = c(linalg::gaussian(rng), linalg::gaussian(rng));
                let anti = |w: C64| Cp1::finite(-c(1.0, 0.0) / w.conj());
                (Cp1::finite(w1), anti(w1), Cp1::finite(w2), anti(w2))
            }
            PairKind::Coplanar => {
                let mut t: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..TAU)).collect();
                if rng.random_bool(0.5) {
                    t.sort_by(f64::total_cmp);
                } else {
                    t.sort_by(f64::total_cmp);
                    t.swap(1, 2);
                }
                let p = |x: f64| Cp1::finite(c(x.cos(), x.sin()));
                (p(t[0]), p(t[1]), p(t[2]), p(t[3]))
            }
            PairKind::SharedEndpoint => {
                let a = random_cp1(rng);
                (a, random_cp1(rng), a, random_cp1(rng))
            }
        };
        let (Ok(g1), Ok(g2)) = (GeodesicH3::new(pair.0, pair.1), GeodesicH3::new(pair.2, pair.3)) else {
            continue;
        };
        return (g1.act(&g), g2.act(&g));
    }
}

/// Tangent to the space of geodesics at finite endpoints `(x, y)`: the
/// velocities `(v, w)` of the endpoints in the affine chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicTangent {
    pub x: C64,
    pub y: C64,
    pub v: C64,
    pub w: C64,
}

/// `q((v₁,w₁),(v₂,w₂)) = q₀(φv₁, w₂) + q₀(φv₂, w₁)` with
/// `q₀(φv, w) = −Re(v w / (x − y)²)`, the value obtained after moving
/// `x ↦ 0`, `y ↦ ∞`, where `φ` is complex conjugation and `q₀` Euclidean.
pub fn geodesic_metric(t1: &GeodesicTangent, t2: &GeodesicTangent) -> Result<f64> {
    if (t1.x - t2.x).norm() > 1e-12 || (t1.y - t2.y).norm() > 1e-12 {
        return Err(Error::Precondition("tangents at different geodesics".into()));
    }
    let s = (t1.x - t1.y).powi(2);
    Ok(-(t1.v * t2.w / s).re - (t2.v * t1.w / s).re)
}

/// `q₀(φv, w)`; spacelike iff positive.
pub fn spacelike_margin(t: &GeodesicTangent) -> f64 {
    -(t.v * t.w / (t.x - t.y).powi(2)).re
}

/// Pencil tangent of `s ↦ geodesic(x + s v, y + s w)` in the smooth basis of
/// [`geodesic_pencil`] for finite endpoints (chart `[z : 1]`).
pub fn geodesic_tangent_vector(t: &GeodesicTangent) -> Result<TangentVector> {
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let u = [t.x, one];
    let w = [t.y, one];
    let a = perp(&u);
    let b = perp(&w);
    let da = [zero, -t.v.conj()];
    let db = [zero, -t.w.conj()];
    let mut base = Vec::new();
    let mut images = Vec::new();
    for cc in [c(1.0, 0.0), c(0.0, 1.0)] {
        base.push(hermitian_to_real(&HermitianForm { m: rank_two_hermitian(&a, &b, cc) }).mat);
        let d = rank_two_hermitian(&da, &b, cc) + rank_two_hermitian(&a, &db, cc);
        images.push(hermitian_to_real(&HermitianForm { m: d }).mat);
    }
    TangentVector::new(Pencil::new(base)?, images)
}

#[derive(Debug, Clone, Serialize)]
pub struct TangentCheck {
    pub spacelike_margin: f64,
    pub fitting: Status,
    pub primal_margin: f64,
}

pub fn geodesic_tangent_fitting(t: &GeodesicTangent, opts: &FeasibilityOptions) -> Result<TangentCheck> {
    let rep = pencils::fitting_direction(&geodesic_tangent_vector(t)?, opts)?;
    Ok(TangentCheck {
        spacelike_margin: spacelike_margin(t),
        fitting: rep.fitting,
        primal_margin: rep.feasibility.as_ref().map(|f| f.primal_margin).unwrap_or(f64::NAN),
    })
}

/// Sample tangents at random geodesics of `C`; spacelike ones must be
/// fitting, and a fitting tangent with `q₀(φv, w) < 0` is searched for.
#[derive(Debug, Clone, Serialize)]
pub struct SpacelikeAudit {
    pub spacelike_samples: usize,
    pub spacelike_fitting: usize,
    pub worst_spacelike_margin: f64,
    pub timelike_fitting_example: Option<(f64, f64)>,
    pub status: Status,
}

pub fn spacelike_fitting_audit(samples: usize, opts: &FeasibilityOptions, seed: u64) -> Result<SpacelikeAudit> {
    let mut rng = linalg::rng(seed);
    let mut n_space = 0;
    let mut n_fit = 0;
    let mut worst = f64::INFINITY;
    let mut example = None;
    for _ in 0..samples {
        let x = c(linalg::gaussian(&mut rng), linalg::gaussian(&mut rng));
        let y = c(linalg::gaussian(&mut rng), linalg::gaussian(&mut rng));
        let v = c(linalg::gaussian(&mut rng), linalg::gaussian(&mut rng));
        let w = c(linalg::gaussian(&mut rng), linalg::gaussian(&mut rng));
        let t = GeodesicTangent { x, y, v, w };
        let chk = geodesic_tangent_fitting(&t, opts)?;
        if chk.spacelike_margin > 0.0 {
            n_space += 1;
            worst = worst.min(chk.primal_margin);
            if chk.fitting.is_true() {
                n_fit += 1;
            }
        } else if example.is_none() && chk.fitting.is_true() {
            example = Some((chk.spacelike_margin, chk.primal_margin));
        }
    }
    let status = Status::from_bool(n_space == n_fit && example.is_some());
    Ok(SpacelikeAudit {
        spacelike_samples: n_space,
        spacelike_fitting: n_fit,
        worst_spacelike_margin: worst,
        timelike_fitting_example: example,
        status,
    })
}

// ---------------------------------------------------------------------------
// PSp(4,R) ≅ SO_o(2,3)

/// Index pairs `(i, j)`, `i < j`, of the basis `e_i ∧ e_j` of `Λ²R⁴`, in the
/// coordinates `(x₁, x₂, y₁, y₂)`.
const WEDGE: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// `α ∧ β = B(α, β) x₁∧y₁∧x₂∧y₂` on `Λ²R⁴`.
fn wedge_gram() -> Mat {
    // sign of the permutation (i, j, k, l) relative to (x1, y1, x2, y2) = (0, 2, 1, 3)
    let pos = [0usize, 2, 1, 3];
    let sign4 = |p: [usize; 4]| -> f64 {
        let mut q = p.map(|i| pos[i]);
        if q.iter().collect::<std::collections::BTreeSet<_>>().len() < 4 {
            return 0.0;
        }
        let mut s = 1.0;
        for i in 0..4 {
            for j in 0..3 - i {
                if q[j] > q[j + 1] {
                    q.swap(j, j + 1);
                    s = -s;
                }
            }
        }
        s
    };
    Mat::from_fn(6, 6, |a, b| {
        let (i, j) = WEDGE[a];
        let (k, l) = WEDGE[b];
        sign4([i, j, k, l])
    })
}

/// Basis of the `ω`-trace-free bivectors, orthonormal for `B` with Gram
/// `diag(+1, +1, −1, −1, −1)`:
/// `(x₁x₂ − y₁y₂, x₁y₂ − x₂y₁, x₁x₂ + y₁y₂, x₁y₂ + x₂y₁, x₁y₁ − x₂y₂)/√2`.
pub fn so23_basis() -> Mat {
    let s = FRAC_1_SQRT_2;
    // columns in the WEDGE coordinates: x1x2, x1y1, x1y2, x2y1, x2y2, y1y2
    let mut u = Mat::zeros(6, 5);
    u[(0, 0)] = s;
    u[(5, 0)] = -s;
    u[(2, 1)] = s;
    u[(3, 1)] = -s;
    u[(0, 2)] = s;
    u[(5, 2)] = s;
    u[(2, 3)] = s;
    u[(3, 3)] = s;
    u[(1, 4)] = s;
    u[(4, 4)] = -s;
    u
}

/// `diag(1, 1, −1, −1, −1)`.
pub fn so23_form() -> Mat {
    Mat::from_diagonal(&Vct::from_row_slice(&[1.0, 1.0, -1.0, -1.0, -1.0]))
}

pub fn minkowski(a: &Vct, b: &Vct) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2] - a[3] * b[3] - a[4] * b[4]
}

/// `Λ²g` in the `WEDGE` basis.
fn second_compound(g: &Mat) -> Mat {
    Mat::from_fn(6, 6, |a, b| {
        let (i, j) = WEDGE[a];
        let (k, l) = WEDGE[b];
        g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)]
    })
}

/// Coordinates in [`so23_basis`] of a bivector given in `WEDGE` coordinates.
fn so23_coords(alpha: &Vct) -> Vct {
    let u = so23_basis();
    let gram = wedge_gram();
    let eta = so23_form();
    eta * u.transpose() * gram * alpha
}

/// The action of a symplectic `g` on the `ω`-trace-free bivectors.
pub fn sp4_so23(g: &Mat) -> Result<Mat> {
    if g.nrows() != 4 || g.ncols() != 4 {
        return Err(Error::Malformed("expected a 4×4 matrix".into()));
    }
    SymplecticSpace::standard(2).check_symplectic(g, 1e-9)?;
    let u = so23_basis();
    let big = second_compound(g) * &u;
    let cols: Vec<Vct> = (0..5).map(|k| so23_coords(&big.column(k).into_owned())).collect();
    Ok(Mat::from_columns(&cols))
}

/// `‖Fᵀ η F − η‖` for the `(2,3)` form `η`.
pub fn so23_residual(f: &Mat) -> f64 {
    let eta = so23_form();
    (f.transpose() * &eta * f - eta).norm()
}

/// `ℓ = ⟨a, b⟩ ↦ [a ∧ b]`, normalized to unit Euclidean length.
pub fn lagrangian_to_isotropic(l: &Lagrangian) -> Result<Vct> {
    if l.frame.nrows() != 4 || l.frame.ncols() != 2 {
        return Err(Error::Malformed("expected a Lagrangian of R⁴".into()));
    }
    let a = l.frame.column(0);
    let b = l.frame.column(1);
    let alpha = Vct::from_iterator(6, WEDGE.iter().map(|&(i, j)| a[i] * b[j] - a[j] * b[i]));
    let v = so23_coords(&alpha);
    let n = v.norm();
    if n < 1e-14 {
        return Err(Error::RankDeficientFrame(0.0));
    }
    Ok(v / n)
}

/// Inverse of [`lagrangian_to_isotropic`]: the column space of the
/// antisymmetric matrix of the decomposable bivector.
pub fn isotropic_to_lagrangian(v: &Vct) -> Result<Lagrangian> {
    let scale = v.norm();
    if v.len() != 5 || scale < 1e-300 {
        return Err(Error::Malformed("expected a nonzero vector of R^{2,3}".into()));
    }
    if minkowski(v, v).abs() > 1e-9 * scale * scale {
        return Err(Error::Precondition("vector is not isotropic".into()));
    }
    let alpha = so23_basis() * v;
    let mut a = Mat::zeros(4, 4);
    for (k, &(i, j)) in WEDGE.iter().enumerate() {
        a[(i, j)] = alpha[k];
        a[(j, i)] = -alpha[k];
    }
    // the two largest columns span the image of a rank-two antisymmetric matrix
    let mut idx: Vec<usize> = (0..4).collect();
    idx.sort_by(|&p, &q| a.column(q).norm().total_cmp(&a.column(p).norm()));
    let f = Mat::from_columns(&[a.column(idx[0]).into_owned(), a.column(idx[1]).into_owned()]);
    let f = if linalg::frame_conditioning(&f) < 1e-6 {
        let svd = a.clone().svd(true, false);
        let u = svd.u.expect("left singular vectors");
        let mut o: Vec<usize> = (0..4).collect();
        o.sort_by(|&p, &q| svd.singular_values[q].total_cmp(&svd.singular_values[p]));
        Mat::from_columns(&[u.column(o[0]).into_owned(), u.column(o[1]).into_owned()])
    } else {
        f
    };
    // Gram–Schmidt keeps integer and half-integer frames exact
    let e1 = f.column(0) / f.column(0).norm();
    let r = f.column(1) - &e1 * e1.dot(&f.column(1));
    let e2 = &r / r.norm();
    Lagrangian::new(&SymplecticSpace::standard(2), Mat::from_columns(&[e1, e2]))
}

/// Pointed totally geodesic spacelike plane of `H^{2,2}`: a base point of
/// norm −1 and an orthonormal spacelike tangent frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacelikePlaneH22 {
    pub p: Vct,
    pub frame: Mat,
}

impl SpacelikePlaneH22 {
    pub fn new(p: Vct, frame: Mat) -> Result<Self> {
        if p.len() != 5 || frame.nrows() != 5 || frame.ncols() != 2 {
            return Err(Error::Malformed("expected a point of R^{2,3} and a 5×2 frame".into()));
        }
        if (minkowski(&p, &p) + 1.0).abs() > 1e-10 {
            return Err(Error::Precondition(format!("⟨p,p⟩ = {} ≠ −1", minkowski(&p, &p))));
        }
        let e1 = frame.column(0).into_owned();
        let e2 = frame.column(1).into_owned();
        if minkowski(&p, &e1).abs() > 1e-10 || minkowski(&p, &e2).abs() > 1e-10 {
            return Err(Error::Precondition("frame is not tangent at p".into()));
        }
        let g = [minkowski(&e1, &e1), minkowski(&e1, &e2), minkowski(&e2, &e2)];
        if !(g[0] > 0.0 && g[0] * g[2] - g[1] * g[1] > 0.0) {
            return Err(Error::Precondition("frame is not spacelike".into()));
        }
        // Gram–Schmidt in the induced metric
        let f1 = &e1 / g[0].sqrt();
        let r = &e2 - &f1 * minkowski(&f1, &e2);
        let f2 = &r / minkowski(&r, &r).sqrt();
        Ok(SpacelikePlaneH22 { p, frame: Mat::from_columns(&[f1, f2]) })
    }

    /// `p = u₃`, plane spanned by `u₁, u₂`.
    pub fn standard() -> Self {
        let e = |i: usize| {
            let mut v = Vct::zeros(5);
            v[i] = 1.0;
            v
        };
        SpacelikePlaneH22 { p: e(2), frame: Mat::from_columns(&[e(0), e(1)]) }
    }

    /// Boundary point `[p + cos θ e₁ + sin θ e₂]` of the geodesic from `p` at angle `θ`.
    pub fn boundary_point(&self, theta: f64) -> Vct {
        let (s, co) = exact_sin_cos(theta);
        &self.p + self.frame.column(0) * co + self.frame.column(1) * s
    }

    pub fn boundary_lagrangian(&self, theta: f64) -> Result<Lagrangian> {
        isotropic_to_lagrangian(&self.boundary_point(theta))
    }

    /// Image under an element of `SO(2,3)`.
    pub fn act(&self, f: &Mat) -> Result<Self> {
        SpacelikePlaneH22::new(f * &self.p, f * &self.frame)
    }
}

/// `sin_cos` that is exact at multiples of `π/2`.
pub fn exact_sin_cos(theta: f64) -> (f64, f64) {
    let k = theta / FRAC_PI_2;
    if (k - k.round()).abs() < 1e-15 * k.abs().max(1.0) {
        return match (k.round() as i64).rem_euclid(4) {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
    }
    theta.sin_cos()
}

/// `q_{ℓ(θ), ℓ(θ+π)}` for the boundary circle of the plane.
pub fn spacelike_plane_quadric(pl: &SpacelikePlaneH22, theta: f64) -> Result<Mat> {
    let sp = SymplecticSpace::standard(2);
    let l1 = pl.boundary_lagrangian(theta)?;
    let l2 = pl.boundary_lagrangian(theta + PI)?;
    Ok(symplectic::pair_quadric(&sp, &l1, &l2)?.mat)
}

/// The plane spanned by `q_{ℓ(θ), ℓ(θ+π)}`, with basis `θ = 0, π/2`.
pub fn spacelike_plane_pencil(pl: &SpacelikePlaneH22) -> Result<Pencil> {
    Pencil::new(vec![spacelike_plane_quadric(pl, 0.0)?, spacelike_plane_quadric(pl, FRAC_PI_2)?])
}

/// A quadric in the coordinates `(x₁, y₁, x₂, y₂)` with the polarization
/// `q(v) = vᵀ M v / 2` used in the displayed matrices, i.e. `2 Pᵀ q P`.
pub fn to_display_basis(q: &Mat) -> Mat {
    let p = symplectic::interleave_permutation(2);
    (&p * q * p.transpose()) * 2.0
}

/// The displayed `θ`-family: blocks `[[sin θ, cos θ], [cos θ, −sin θ]]`.
pub fn displayed_quadric(theta: f64) -> Mat {
    let (s, co) = exact_sin_cos(theta);
    let mut m = Mat::zeros(4, 4);
    for b in [0, 2] {
        m[(b, b)] = s;
        m[(b, b + 1)] = co;
        m[(b + 1, b)] = co;
        m[(b + 1, b + 1)] = 0.0 - s;
    }
    m
}

#[derive(Debug, Clone, Serialize)]
pub struct ThetaFamilyReport {
    pub exact_at_zero: bool,
    /// `max |q_{ℓ(θ),ℓ(θ+π)} − D(θ)|` for the displayed family `D`.
    pub same_angle_error: f64,
    /// `max |q_{ℓ(−θ),ℓ(−θ+π)} − D(θ)|`.
    pub reflected_angle_error: f64,
    /// `max |D(θ)(v, v)|` over unit `v ∈ ℓ(θ)`; zero iff `D(θ)` vanishes on `ℓ(θ)`.
    pub displayed_on_boundary: f64,
    /// Largest distance of a displayed quadric from the computed plane.
    pub span_residual: f64,
    pub maximal: Status,
    pub winding: Option<i64>,
}

/// Compare the standard plane's quadrics with the displayed family on a
/// `θ`-grid and classify the plane.
///
/// The displayed family vanishes on `ℓ(−θ)` rather than `ℓ(θ)`: conjugating
/// by the rotation taking `ℓ(0)` to `ℓ(θ)` gives `R_{−θ/2} q R_{θ/2}`. Both
/// parametrizations trace the same plane, so the family is compared at `−θ`.
pub fn theta_family_audit(samples: usize) -> Result<ThetaFamilyReport> {
    let pl = SpacelikePlaneH22::standard();
    let q0 = to_display_basis(&spacelike_plane_quadric(&pl, 0.0)?);
    let exact_at_zero = q0 == displayed_quadric(0.0);
    let pencil = spacelike_plane_pencil(&pl)?;
    let perm = symplectic::interleave_permutation(2);
    let (mut same, mut refl, mut on_bd, mut res) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..samples {
        let th = TAU * k as f64 / samples as f64;
        let d = displayed_quadric(th);
        same = same.max((to_display_basis(&spacelike_plane_quadric(&pl, th)?) - &d).amax());
        refl = refl.max((to_display_basis(&spacelike_plane_quadric(&pl, -th)?) - &d).amax());
        let f = &perm * pl.boundary_lagrangian(th)?.orthonormal_frame();
        on_bd = on_bd.max(linalg::sym_eigenvalues(&(f.transpose() * &d * &f)).amax());
        res = res.max(pencil.residual(&(perm.transpose() * &d * &perm)));
    }
    let class = pencils::classify(&pencil, &pencils::ClassifyOptions::default())?;
    Ok(ThetaFamilyReport {
        exact_at_zero,
        same_angle_error: same,
        reflected_angle_error: refl,
        displayed_on_boundary: on_bd,
        span_residual: res,
        maximal: class.maximal,
        winding: class.winding,
    })
}

// ---------------------------------------------------------------------------
// Spacelike surfaces in H^{2,2}

/// Graph surface `s ↦ N(s₁u₁ + s₂u₂ + u₃ + f₄(s)u₄ + f₅(s)u₅)` with quadratic
/// heights `f_k(s) = ½ sᵀ H_k s` plus a cubic term `c_k s₁²s₂`, where `N`
/// rescales to norm −1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSurface {
    pub h4: [[f64; 2]; 2],
    pub h5: [[f64; 2]; 2],
    #[serde(default)]
    pub cubic: [f64; 2],
}

impl GraphSurface {
    pub fn flat() -> Self {
        GraphSurface { h4: [[0.0; 2]; 2], h5: [[0.0; 2]; 2], cubic: [0.0; 2] }
    }

    pub fn eval(&self, s: [f64; 2]) -> Result<Vct> {
        let f = |h: &[[f64; 2]; 2], c3: f64| {
            0.5 * (h[0][0] * s[0] * s[0] + 2.0 * h[0][1] * s[0] * s[1] + h[1][1] * s[1] * s[1]) + c3 * s[0] * s[0] * s[1]
        };
        let w = Vct::from_row_slice(&[s[0], s[1], 1.0, f(&self.h4, self.cubic[0]), f(&self.h5, self.cubic[1])]);
        let n = minkowski(&w, &w);
        if !(n < 0.0) {
            return Err(Error::Precondition("graph leaves H^{2,2}".into()));
        }
        Ok(w / (-n).sqrt())
    }
}

/// First and second derivatives of `u` by central differences.
fn surface_jet(surf: &GraphSurface, s: [f64; 2]) -> Result<(Vct, [Vct; 2], [[Vct; 2]; 2])> {
    let h = 1e-4;
    let at = |a: f64, b: f64| surf.eval([s[0] + a, s[1] + b]);
    let u = at(0.0, 0.0)?;
    // project on T_u H^{2,2} = u^⊥ to remove the difference-quotient error
    let tangent = |d: Vct| &d + &u * minkowski(&u, &d);
    let d1 = [tangent((at(h, 0.0)? - at(-h, 0.0)?) / (2.0 * h)), tangent((at(0.0, h)? - at(0.0, -h)?) / (2.0 * h))];
    let d11 = (at(h, 0.0)? - &u * 2.0 + at(-h, 0.0)?) / (h * h);
    let d22 = (at(0.0, h)? - &u * 2.0 + at(0.0, -h)?) / (h * h);
    let d12 = (at(h, h)? - at(h, -h)? - at(-h, h)? + at(-h, -h)?) / (4.0 * h * h);
    Ok((u, d1, [[d11, d12.clone()], [d12, d22]]))
}

/// Component of `x` orthogonal to `span{p, u₁, u₂}` in the `(2,3)` form.
fn normal_part(x: &Vct, p: &Vct, t: &[Vct; 2]) -> Vct {
    let basis = [p.clone(), t[0].clone(), t[1].clone()];
    let g = Mat::from_fn(3, 3, |i, j| minkowski(&basis[i], &basis[j]));
    let rhs = Vct::from_iterator(3, basis.iter().map(|b| minkowski(b, x)));
    let coef = g.lu().solve(&rhs).unwrap_or_else(|| Vct::zeros(3));
    let mut out = x.clone();
    for (b, &cf) in basis.iter().zip(coef.iter()) {
        out -= b * cf;
    }
    out
}

/// Timelike norm `√(−⟨n, n⟩)` of a normal vector.
fn timelike_norm(n: &Vct) -> f64 {
    (-minkowski(n, n)).max(0.0).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceSample {
    pub s: [f64; 2],
    /// `max ‖II(v,v)‖` over unit tangents.
    pub second_form_bound: f64,
    pub bound_ok: bool,
    /// `min ⟨ṽ⁺, ṽ⁺⟩` over sampled unit pairs `(γ', V)`, where `ṽ⁺` is the
    /// derivative of the lightlike lift `V + γ`, for both `±V`.
    pub endpoint_norm: f64,
    pub endpoint_spacelike: bool,
    /// Smallest primal margin of the Gauss-map pencil tangents.
    pub fitting_margin: f64,
    pub fitting: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct GaussAudit {
    pub samples: Vec<SurfaceSample>,
    pub bound_violations: usize,
    pub endpoint_failures: usize,
    pub fitting: Status,
}

/// Gauss map of the surface at `s`: the pencil of its pointed tangent plane.
pub fn surface_gauss_pencil(surf: &GraphSurface, s: [f64; 2]) -> Result<Pencil> {
    let (u, d1, _) = surface_jet(surf, s)?;
    let pl = SpacelikePlaneH22::new(u, Mat::from_columns(&[d1[0].clone(), d1[1].clone()]))?;
    spacelike_plane_pencil(&pl)
}

/// Checks per sample point: the bound `‖II(v,v)‖ < ‖v‖`, spacelikeness of
/// the endpoint curves `V^±` along induced geodesics, and the fitting test
/// of the Gauss-map pencil along sampled directions.
pub fn spacelike_gauss_audit(surf: &GraphSurface, points: &[[f64; 2]], directions: usize, opts: &FeasibilityOptions) -> Result<GaussAudit> {
    let mut out = Vec::with_capacity(points.len());
    for &s in points {
        let (u, d1, d2) = surface_jet(surf, s)?;
        let g = Mat::from_fn(2, 2, |i, j| minkowski(&d1[i], &d1[j]));
        if !(g[(0, 0)] > 0.0 && g.determinant() > 0.0) {
            return Err(Error::Precondition("surface is not spacelike at a sample".into()));
        }
        let ii = |a: &[f64; 2], b: &[f64; 2]| {
            let mut x = Vct::zeros(5);
            for i in 0..2 {
                for j in 0..2 {
                    x += &d2[i][j] * (a[i] * b[j]);
                }
            }
            normal_part(&x, &u, &d1)
        };
        // orthonormal frame of the induced metric
        let unit = |a: [f64; 2]| {
            let n = (a[0] * a[0] * g[(0, 0)] + 2.0 * a[0] * a[1] * g[(0, 1)] + a[1] * a[1] * g[(1, 1)]).sqrt();
            [a[0] / n, a[1] / n]
        };
        let perp_dir = |a: [f64; 2]| {
            // b with g(a, b) = 0
            let ga = [g[(0, 0)] * a[0] + g[(0, 1)] * a[1], g[(1, 0)] * a[0] + g[(1, 1)] * a[1]];
            unit([-ga[1], ga[0]])
        };
        let mut bound = 0.0f64;
        let mut endpoint = f64::INFINITY;
        let mut fit_margin = f64::INFINITY;
        let mut fitting = Status::True;
        let pencil = surface_gauss_pencil(surf, s)?;
        for k in 0..directions {
            let th = PI * k as f64 / directions as f64;
            let a = unit([th.cos(), th.sin()]);
            bound = bound.max(timelike_norm(&ii(&a, &a)));
            let b = perp_dir(a);
            let gamma = Vct::from_iterator(5, (0..5).map(|r| d1[0][r] * a[0] + d1[1][r] * a[1]));
            for sign in [1.0, -1.0] {
                // derivative of V + γ along a parallel V: the normal part II(V, γ') plus γ'
                let n = ii(&b, &a) * sign;
                let dv = &n + &gamma;
                endpoint = endpoint.min(minkowski(&dv, &dv));
            }
            let h = 1e-5;
            let plus = surface_gauss_pencil(surf, [s[0] + h * a[0], s[1] + h * a[1]])?;
            let minus = surface_gauss_pencil(surf, [s[0] - h * a[0], s[1] - h * a[1]])?;
            let images: Vec<Mat> = plus.basis.iter().zip(&minus.basis).map(|(p, m)| (p - m) / (2.0 * h)).collect();
            let tv = TangentVector::new(pencil.clone(), images)?;
            let rep = pencils::fitting_direction(&tv, opts)?;
            fitting = fitting.and(rep.fitting);
            fit_margin = fit_margin.min(rep.feasibility.as_ref().map(|f| f.primal_margin).unwrap_or(f64::NAN));
        }
        out.push(SurfaceSample {
            s,
            second_form_bound: bound,
            bound_ok: bound < 1.0,
            endpoint_norm: endpoint,
            endpoint_spacelike: endpoint > 0.0,
            fitting_margin: fit_margin,
            fitting,
        });
    }
    let bound_violations = out.iter().filter(|x| !x.bound_ok).count();
    let endpoint_failures = out.iter().filter(|x| !x.endpoint_spacelike).count();
    let fitting = out.iter().fold(Status::True, |a, x| a.and(x.fitting));
    Ok(GaussAudit { samples: out, bound_violations, endpoint_failures, fitting })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_diag_unpacks_to_real_diag() {
        let h = HermitianForm::from_coords(1.0, -1.0, 0.0, 0.0);
        let q = hermitian_to_real(&h).mat;
        assert_eq!(q, Mat::from_diagonal(&Vct::from_row_slice(&[1.0, 1.0, -1.0, -1.0])));
        let back = real_to_hermitian(&q).unwrap();
        assert_eq!(back.coords(), h.coords());
    }

    #[test]
    fn real_form_evaluates_hermitian_form() {
        let mut rng = linalg::rng(2);
        for _ in 0..20 {
            let h = HermitianForm::from_coords(linalg::gaussian(&mut rng), linalg::gaussian(&mut rng), linalg::gaussian(&mut rng), linalg::gaussian(&mut rng));
            let q = hermitian_to_real(&h);
            let z = [c(linalg::gaussian(&mut rng), linalg::gaussian(&mut rng)), c(linalg::gaussian(&mut rng), linalg::gaussian(&mut rng))];
            let w = Vct::from_row_slice(&[z[0].re, z[0].im, z[1].re, z[1].im]);
            assert!((q.eval(&w) - h.eval(&z)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_and_infinity_give_off_diagonal_forms() {
        let g = GeodesicH3::new(Cp1::finite(c(0.0, 0.0)), Cp1::Infinity).unwrap();
        let p = geodesic_pencil(&g).unwrap();
        for b in &p.basis {
            let h = real_to_hermitian(b).unwrap();
            assert!(h.m[(0, 0)].norm() < 1e-15 && h.m[(1, 1)].norm() < 1e-15);
        }
        let (_, err) = pencil_geodesic_roundtrip(&g).unwrap();
        assert!(err < 1e-12);
    }

    #[test]
    fn distance_classifies_reference_pairs() {
        let z = |x: f64| Cp1::finite(c(x, 0.0));
        let axis = GeodesicH3::new(z(0.0), Cp1::Infinity).unwrap();
        let far = GeodesicH3::new(z(1.0), z(2.0)).unwrap();
        let crossing = GeodesicH3::new(z(-1.0), z(1.0)).unwrap();
        let shared = GeodesicH3::new(z(0.0), z(3.0)).unwrap();
        assert_eq!(geodesics_disjoint(&axis, &far).0, Status::True);
        assert_eq!(geodesics_disjoint(&axis, &crossing).0, Status::False);
        assert_eq!(geodesics_disjoint(&axis, &shared).0, Status::False);
        // cosh d = (1 + r)/(1 − r) with r = 1/2
        assert!((geodesic_distance(&axis, &far) - 3f64.acosh()).abs() < 1e-12);
    }

    #[test]
    fn so23_identity_and_form() {
        let id = sp4_so23(&Mat::identity(4, 4)).unwrap();
        assert!((id - Mat::identity(5, 5)).norm() < 1e-15);
        let u = so23_basis();
        let gram = u.transpose() * wedge_gram() * &u;
        assert!((gram - so23_form()).norm() < 1e-15);
    }

    #[test]
    fn x_lagrangian_is_isotropic_decomposable_line() {
        let sp = SymplecticSpace::standard(2);
        let v = lagrangian_to_isotropic(&sp.x_lagrangian()).unwrap();
        assert!(minkowski(&v, &v).abs() < 1e-15);
        let l = isotropic_to_lagrangian(&v).unwrap();
        assert!(l.distance(&sp.x_lagrangian()) < 1e-12);
    }

    #[test]
    fn standard_plane_boundary_matches_half_angle_family() {
        let pl = SpacelikePlaneH22::standard();
        let sp = SymplecticSpace::standard(2);
        for k in 0..12 {
            let th = TAU * k as f64 / 12.0;
            let (s, co) = (th / 2.0).sin_cos();
            let f = Mat::from_row_slice(4, 2, &[co, 0.0, 0.0, co, s, 0.0, 0.0, s]);
            let l = Lagrangian::new(&sp, f).unwrap();
            assert!(pl.boundary_lagrangian(th).unwrap().distance(&l) < 1e-12);
        }
    }

    #[test]
    fn flat_surface_is_totally_geodesic() {
        let surf = GraphSurface::flat();
        let a = spacelike_gauss_audit(&surf, &[[0.0, 0.0]], 4, &FeasibilityOptions::default()).unwrap();
        assert!(a.samples[0].second_form_bound < 1e-6);
        assert!((a.samples[0].endpoint_norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn standard_plane_quadrics_match_displayed_family() {
        let r = theta_family_audit(48).unwrap();
        assert!(r.exact_at_zero);
        assert!(r.reflected_angle_error < 1e-12);
        assert!(r.span_residual < 1e-12);
        assert_eq!(r.maximal, Status::True);
        assert_eq!(r.winding.map(i64::abs), Some(2));
    }

    #[test]
    fn so23_is_a_homomorphism() {
        let mut rng = linalg::rng(9);
        for _ in 0..20 {
            let g = symplectic::random_symplectic(&mut rng, 2, 0.7);
            let h = symplectic::random_symplectic(&mut rng, 2, 0.7);
            let fg = sp4_so23(&g).unwrap();
            let r = (sp4_so23(&(&g * &h)).unwrap() - &fg * sp4_so23(&h).unwrap()).norm();
            assert!(r < 1e-8 && so23_residual(&fg) < 1e-9);
        }
        assert!(sp4_so23(&Mat::from_diagonal_element(4, 4, 2.0)).is_err());
    }

    #[test]
    fn saddle_with_large_second_form_breaks_endpoint_spacelikeness() {
        let surf = GraphSurface { h4: [[2.5, 0.0], [0.0, -2.5]], h5: [[0.0; 2]; 2], cubic: [0.0; 2] };
        let a = spacelike_gauss_audit(&surf, &[[0.0, 0.0]], 8, &FeasibilityOptions::default()).unwrap();
        assert!(!a.samples[0].bound_ok && !a.samples[0].endpoint_spacelike);
    }
}
