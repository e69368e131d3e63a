//! Symplectic linear algebra: Lagrangians, the pair quadric, Maslov index,
//! maximal triples and quadruples, Maslov winding of Lagrangian loops.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::quadrics::Quadric;
use nalgebra::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Smallest admissible `σ_min/σ_max` of the concatenated frames of two
/// transverse Lagrangians.
pub const TRANSVERSE_TOL: f64 = 1e-8;
/// Isotropy tolerance for Lagrangian frames.
pub const ISOTROPY_TOL: f64 = 1e-10;

/// `R^{2n}` with a symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpace {
    pub n: usize,
    pub omega: Mat,
}

impl SymplecticSpace {
    /// `ω = Σ x_i* ∧ y_i*` in the basis `(x_1..x_n, y_1..y_n)`.
    pub fn standard(n: usize) -> Self {
        SymplecticSpace { n, omega: standard_omega(n) }
    }

    pub fn new(omega: Mat) -> Result<Self> {
        let d = omega.nrows();
        if d != omega.ncols() || d == 0 || d % 2 != 0 {
            return Err(Error::Malformed("symplectic form must be square of even size".into()));
        }
        if (&omega + omega.transpose()).amax() > 1e-12 * omega.amax() {
            return Err(Error::Malformed("symplectic form is not antisymmetric".into()));
        }
        if linalg::frame_conditioning(&omega) < 1e-12 {
            return Err(Error::Malformed("symplectic form is degenerate".into()));
        }
        Ok(SymplecticSpace { n: d / 2, omega })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// `ω(v, w) = vᵀ Ω w`.
    pub fn pairing(&self, v: &linalg::Vct, w: &linalg::Vct) -> f64 {
        v.dot(&(&self.omega * w))
    }

    /// `‖gᵀωg − ω‖_max`.
    pub fn symplectic_residual(&self, g: &Mat) -> f64 {
        (g.transpose() * &self.omega * g - &self.omega).amax()
    }

    pub fn check_symplectic(&self, g: &Mat, tol: f64) -> Result<()> {
        let r = self.symplectic_residual(g);
        if r > tol * g.amax().powi(2).max(1.0) {
            return Err(Error::NotSymplectic(r));
        }
        Ok(())
    }

    /// `⟨x_1, …, x_n⟩`.
    pub fn x_lagrangian(&self) -> Lagrangian {
        let mut f = Mat::zeros(2 * self.n, self.n);
        for i in 0..self.n {
            f[(i, i)] = 1.0;
        }
        Lagrangian { frame: f }
    }

    /// `⟨y_1, …, y_n⟩`.
    pub fn y_lagrangian(&self) -> Lagrangian {
        let mut f = Mat::zeros(2 * self.n, self.n);
        for i in 0..self.n {
            f[(self.n + i, i)] = 1.0;
        }
        Lagrangian { frame: f }
    }

    /// `⟨x_1 + ε_1 y_1, …, x_n + ε_n y_n⟩`.
    pub fn graph_lagrangian(&self, eps: &[f64]) -> Lagrangian {
        let mut f = Mat::zeros(2 * self.n, self.n);
        for i in 0..self.n {
            f[(i, i)] = 1.0;
            f[(self.n + i, i)] = eps[i];
        }
        Lagrangian { frame: f }
    }

    /// The triple `(⟨x⟩, ⟨x_i + ε_i y_i⟩, ⟨y⟩)` with Maslov index `Σε_i`.
    pub fn normal_form_triple(&self, eps: &[f64]) -> [Lagrangian; 3] {
        [self.x_lagrangian(), self.graph_lagrangian(eps), self.y_lagrangian()]
    }
}

pub fn standard_omega(n: usize) -> Mat {
    let mut w = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        w[(i, n + i)] = 1.0;
        w[(n + i, i)] = -1.0;
    }
    w
}

/// Retraction onto positive definite symplectic matrices: the midpoint
/// `X # ωX^{-1}ωᵀ` of `X` and its image under the involution whose fixed set
/// they form.
pub fn sp_retract(x: &Mat) -> Result<Mat> {
    let l = linalg::lambda_min(x).0;
    if !(l > 0.0) {
        return Err(Error::NotPositiveDefinite(l));
    }
    let x = linalg::symmetrize(x);
    let w = standard_omega(x.nrows() / 2);
    let xi = x.clone().try_inverse().ok_or(Error::NotPositiveDefinite(0.0))?;
    let s = linalg::symmetrize(&(&w * xi * w.transpose()));
    Ok(linalg::geometric_mean(&x, &s))
}

/// `exp(ω^{-1} S)` for a random symmetric `S` of size `spread`: a random
/// element of `Sp(2n, R)` for the standard form.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize, spread: f64) -> Mat {
    let s = linalg::random_symmetric(rng, 2 * n) * (spread / (2.0 * n as f64).sqrt());
    let ham = -standard_omega(n) * s;
    linalg::expm(&ham)
}

/// An `n`-dimensional isotropic subspace, stored by a `2n×n` frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lagrangian {
    #[serde(with = "crate::io::mat_rows")]
    pub frame: Mat,
}

impl Lagrangian {
    pub fn new(space: &SymplecticSpace, frame: Mat) -> Result<Self> {
        if frame.nrows() != space.dim() || frame.ncols() != space.n {
            return Err(Error::Malformed(format!(
                "lagrangian frame is {}x{}, expected {}x{}",
                frame.nrows(),
                frame.ncols(),
                space.dim(),
                space.n
            )));
        }
        let c = linalg::frame_conditioning(&frame);
        if c < 1e-10 {
            return Err(Error::RankDeficientFrame(c));
        }
        let q = linalg::orthonormalize(&frame);
        let iso = (q.transpose() * &space.omega * &q).amax();
        if iso > ISOTROPY_TOL {
            return Err(Error::Malformed(format!("frame is not isotropic: residual {iso:.3e}")));
        }
        Ok(Lagrangian { frame })
    }

    pub fn n(&self) -> usize {
        self.frame.ncols()
    }

    pub fn orthonormal_frame(&self) -> Mat {
        linalg::orthonormalize(&self.frame)
    }

    /// `g·ℓ`.
    pub fn act(&self, g: &Mat) -> Lagrangian {
        Lagrangian { frame: g * &self.frame }
    }

    /// Isotropy residual `‖QᵀωQ‖` of the orthonormalized frame.
    pub fn isotropy_residual(&self, space: &SymplecticSpace) -> f64 {
        let q = self.orthonormal_frame();
        (q.transpose() * &space.omega * &q).amax()
    }

    /// `σ_min/σ_max` of the concatenated orthonormal frames.
    pub fn transversality(&self, other: &Lagrangian) -> f64 {
        let mut t = Mat::zeros(self.frame.nrows(), self.n() + other.n());
        t.columns_mut(0, self.n()).copy_from(&self.orthonormal_frame());
        t.columns_mut(self.n(), other.n()).copy_from(&other.orthonormal_frame());
        linalg::frame_conditioning(&t)
    }

    pub fn is_transverse(&self, other: &Lagrangian) -> bool {
        self.transversality(other) > TRANSVERSE_TOL
    }

    /// Largest principal angle to another Lagrangian.
    pub fn distance(&self, other: &Lagrangian) -> f64 {
        linalg::subspace_distance(&self.frame, &other.frame)
    }

    /// `det(X + iY)²` for an orthonormal frame `[X; Y]`, independent of the frame.
    pub fn det_squared(&self) -> Complex<f64> {
        let q = self.orthonormal_frame();
        let n = self.n();
        let u = nalgebra::DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| Complex::new(q[(i, j)], q[(n + i, j)]));
        let d = u.determinant();
        d * d
    }
}

/// A cyclically ordered sample of a loop of Lagrangians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangianLoop {
    pub samples: Vec<Lagrangian>,
    pub params: Vec<f64>,
}

impl LagrangianLoop {
    pub fn new(samples: Vec<Lagrangian>, params: Vec<f64>) -> Result<Self> {
        if samples.is_empty() || samples.len() != params.len() {
            return Err(Error::Malformed("loop needs matching non-empty samples and parameters".into()));
        }
        Ok(LagrangianLoop { samples, params })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// The same loop traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut s = self.samples.clone();
        s.reverse();
        let p = self.params.iter().rev().map(|t| TAU - t).collect();
        LagrangianLoop { samples: s, params: p }
    }

    /// Concatenation of two loops based at nearby points.
    pub fn concat(&self, other: &LagrangianLoop) -> Self {
        let mut s = self.samples.clone();
        s.extend(other.samples.iter().cloned());
        let k = s.len() as f64;
        let p = (0..s.len()).map(|i| TAU * i as f64 / k).collect();
        LagrangianLoop { samples: s, params: p }
    }

    /// Largest principal angle between consecutive samples, closing included.
    pub fn max_step(&self) -> f64 {
        let k = self.samples.len();
        (0..k).map(|i| self.samples[i].distance(&self.samples[(i + 1) % k])).fold(0.0, f64::max)
    }

    pub fn act(&self, g: &Mat) -> Self {
        LagrangianLoop { samples: self.samples.iter().map(|l| l.act(g)).collect(), params: self.params.clone() }
    }
}

fn transverse_pair_frame(l1: &Lagrangian, l2: &Lagrangian) -> Result<Mat> {
    let c = l1.transversality(l2);
    if c <= TRANSVERSE_TOL {
        return Err(Error::NotTransverse(c));
    }
    let n = l1.n();
    let mut t = Mat::zeros(2 * n, 2 * n);
    t.columns_mut(0, n).copy_from(&l1.frame);
    t.columns_mut(n, n).copy_from(&l2.frame);
    Ok(t)
}

/// The form `v ↦ ω(π_1 v, π_2 v)` for the splitting `V = ℓ_1 ⊕ ℓ_2`.
///
/// Both Lagrangians are isotropic for it and its polarization on
/// `ℓ_1 × ℓ_2` is `½ω`.
pub fn pair_quadric(space: &SymplecticSpace, l1: &Lagrangian, l2: &Lagrangian) -> Result<Quadric> {
    let t = transverse_pair_frame(l1, l2)?;
    let n = space.n;
    let c = l1.frame.transpose() * &space.omega * &l2.frame;
    let mut m = Mat::zeros(2 * n, 2 * n);
    m.view_mut((0, n), (n, n)).copy_from(&(&c * 0.5));
    m.view_mut((n, 0), (n, n)).copy_from(&(c.transpose() * 0.5));
    let ti = t.try_inverse().ok_or(Error::NotTransverse(0.0))?;
    let q = ti.transpose() * m * &ti;
    Ok(Quadric { dim: 2 * n, mat: linalg::symmetrize(&q) })
}

fn check_triple(l: &[&Lagrangian]) -> Result<()> {
    for i in 0..l.len() {
        for j in i + 1..l.len() {
            let c = l[i].transversality(l[j]);
            if c <= TRANSVERSE_TOL {
                return Err(Error::NotTransverse(c));
            }
        }
    }
    Ok(())
}

fn restricted_eigenvalues(space: &SymplecticSpace, l1: &Lagrangian, l2: &Lagrangian, l3: &Lagrangian) -> Result<linalg::Vct> {
    check_triple(&[l1, l2, l3])?;
    let q = pair_quadric(space, l1, l3)?;
    let f = l2.orthonormal_frame();
    Ok(linalg::sym_eigenvalues(&(f.transpose() * &q.mat * &f)))
}

/// `M(ℓ_1, ℓ_2, ℓ_3)`: signature of `q_{ℓ_1,ℓ_3}` restricted to `ℓ_2`.
pub fn maslov_index(space: &SymplecticSpace, l1: &Lagrangian, l2: &Lagrangian, l3: &Lagrangian) -> Result<i64> {
    let ev = restricted_eigenvalues(space, l1, l2, l3)?;
    // transversality of ℓ_2 with ℓ_1, ℓ_3 makes the restriction nondegenerate
    Ok(ev.iter().map(|&l| if l > 0.0 { 1 } else { -1 }).sum())
}

/// Smallest eigenvalue of `q_{ℓ_1,ℓ_3}` on an orthonormal frame of `ℓ_2`.
pub fn triple_margin(space: &SymplecticSpace, l1: &Lagrangian, l2: &Lagrangian, l3: &Lagrangian) -> Result<f64> {
    Ok(restricted_eigenvalues(space, l1, l2, l3)?[0])
}

/// Maximal iff `q_{ℓ_1,ℓ_3}` is positive on `ℓ_2`.
pub fn is_maximal_triple(space: &SymplecticSpace, l1: &Lagrangian, l2: &Lagrangian, l3: &Lagrangian) -> Result<bool> {
    Ok(triple_margin(space, l1, l2, l3)? > 0.0)
}

/// All four cyclic subtriples maximal.
pub fn is_maximal_quadruple(space: &SymplecticSpace, l: [&Lagrangian; 4]) -> Result<bool> {
    check_triple(&l)?;
    for (a, b, c) in [(0, 1, 2), (1, 2, 3), (2, 3, 0), (3, 0, 1)] {
        if !is_maximal_triple(space, l[a], l[b], l[c])? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `λ_min(q_{ℓ_4,ℓ_3} − q_{ℓ_1,ℓ_2})`, positive on maximal quadruples.
pub fn quadruple_margin(space: &SymplecticSpace, l: [&Lagrangian; 4]) -> Result<f64> {
    let a = pair_quadric(space, l[3], l[2])?;
    let b = pair_quadric(space, l[0], l[1])?;
    Ok(linalg::lambda_min(&(&a.mat - &b.mat)).0)
}

/// Class of a loop in `π_1(L_n) ≅ Z`: winding of `det²(X + iY)`.
pub fn maslov_winding(lp: &LagrangianLoop) -> Result<i64> {
    let k = lp.samples.len();
    if k < 2 {
        return Ok(0);
    }
    let dets: Vec<Complex<f64>> = lp.samples.iter().map(|l| l.det_squared()).collect();
    let mut total = 0.0;
    for i in 0..k {
        let j = (i + 1) % k;
        let gap = lp.samples[i].distance(&lp.samples[j]);
        let step = (dets[j] / dets[i]).arg();
        if gap >= PI / 8.0 || step.abs() > 0.9 * PI {
            return Err(Error::Continuation { index: i, gap });
        }
        total += step;
    }
    Ok((total / TAU).round() as i64)
}

/// `θ ↦ ⟨cos(θ/2) x_1 + sin(θ/2) y_1, x_2, …, x_n⟩`, generator of `π_1(L_n)`.
pub fn tau_loop(space: &SymplecticSpace, k: usize) -> Result<LagrangianLoop> {
    if k < 16 {
        return Err(Error::Precondition("tau loop needs at least 16 samples".into()));
    }
    let n = space.n;
    let mut samples = Vec::with_capacity(k);
    let mut params = Vec::with_capacity(k);
    for s in 0..k {
        let th = TAU * s as f64 / k as f64;
        let mut f = Mat::zeros(2 * n, n);
        f[(0, 0)] = (th / 2.0).cos();
        f[(n, 0)] = (th / 2.0).sin();
        for i in 1..n {
            f[(i, i)] = 1.0;
        }
        samples.push(Lagrangian { frame: f });
        params.push(th);
    }
    Ok(LagrangianLoop { samples, params })
}

/// `θ ↦ ⟨cos(θ/2) x_i + ε_i sin(θ/2) y_i⟩_i`, of class `Σε_i`.
pub fn tau_zero_loop(space: &SymplecticSpace, eps: &[f64], k: usize) -> LagrangianLoop {
    let n = space.n;
    let mut samples = Vec::with_capacity(k);
    let mut params = Vec::with_capacity(k);
    for s in 0..k {
        let th = TAU * s as f64 / k as f64;
        let mut f = Mat::zeros(2 * n, n);
        for i in 0..n {
            f[(i, i)] = (th / 2.0).cos();
            f[(n + i, i)] = eps[i] * (th / 2.0).sin();
        }
        samples.push(Lagrangian { frame: f });
        params.push(th);
    }
    LagrangianLoop { samples, params }
}

/// Random Lagrangian `g·⟨x⟩` for a random symplectic `g`.
pub fn random_lagrangian<R: Rng + ?Sized>(rng: &mut R, space: &SymplecticSpace) -> Lagrangian {
    let g = random_symplectic(rng, space.n, 1.0);
    space.x_lagrangian().act(&g)
}

/// Permutation taking coordinates `(x_1..x_n, y_1..y_n)` to
/// `(x_1, y_1, x_2, y_2, …)`: `(P v)_{2i} = x_i`, `(P v)_{2i+1} = y_i`.
pub fn interleave_permutation(n: usize) -> Mat {
    let mut p = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        p[(2 * i, i)] = 1.0;
        p[(2 * i + 1, n + i)] = 1.0;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_quadric_of_coordinate_lagrangians() {
        let sp = SymplecticSpace::standard(2);
        let q = pair_quadric(&sp, &sp.x_lagrangian(), &sp.y_lagrangian()).unwrap();
        let mut expect = Mat::zeros(4, 4);
        for i in 0..2 {
            expect[(i, 2 + i)] = 0.5;
            expect[(2 + i, i)] = 0.5;
        }
        assert!((&q.mat - expect).amax() < 1e-15);
    }

    #[test]
    fn normal_form_indices() {
        let sp = SymplecticSpace::standard(2);
        let [a, b, c] = sp.normal_form_triple(&[1.0, 1.0]);
        assert_eq!(maslov_index(&sp, &a, &b, &c).unwrap(), 2);
        assert!(is_maximal_triple(&sp, &a, &b, &c).unwrap());
        let [a, b, c] = sp.normal_form_triple(&[1.0, -1.0]);
        assert_eq!(maslov_index(&sp, &a, &b, &c).unwrap(), 0);
        assert!(!is_maximal_triple(&sp, &a, &b, &c).unwrap());
    }

    #[test]
    fn non_transverse_rejected() {
        let sp = SymplecticSpace::standard(1);
        let x = sp.x_lagrangian();
        assert!(matches!(pair_quadric(&sp, &x, &x), Err(Error::NotTransverse(_))));
    }

    #[test]
    fn tau_windings() {
        for n in 1..=3 {
            let sp = SymplecticSpace::standard(n);
            let t = tau_loop(&sp, 64).unwrap();
            assert_eq!(maslov_winding(&t).unwrap(), 1);
            assert_eq!(maslov_winding(&t.reversed()).unwrap(), -1);
        }
        let sp = SymplecticSpace::standard(2);
        assert_eq!(maslov_winding(&tau_zero_loop(&sp, &[1.0, 1.0], 64)).unwrap(), 2);
        let c = LagrangianLoop::new(vec![sp.x_lagrangian(); 20], (0..20).map(|i| i as f64).collect()).unwrap();
        assert_eq!(maslov_winding(&c).unwrap(), 0);
    }

    #[test]
    fn coarse_loop_is_ambiguous() {
        let sp = SymplecticSpace::standard(1);
        let mut t = tau_loop(&sp, 16).unwrap();
        t.samples = t.samples.into_iter().step_by(4).collect();
        t.params = t.params.into_iter().step_by(4).collect();
        assert!(matches!(maslov_winding(&t), Err(Error::Continuation { .. })));
    }

    #[test]
    fn random_symplectic_preserves_form() {
        let mut r = linalg::rng(3);
        let sp = SymplecticSpace::standard(3);
        let g = random_symplectic(&mut r, 3, 1.0);
        assert!(sp.symplectic_residual(&g) < 1e-12 * g.amax().powi(2));
    }
}
