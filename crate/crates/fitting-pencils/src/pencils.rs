//! Pencils of quadrics, their classification tower
//! `maximal ⊂ ω-regular ⊂ (n,n) ⊂ mixed`, boundary loops of positive
//! Lagrangians, fitting pairs and fitting directions.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vct};
use crate::quadrics::{self, FeasibilityOptions, FeasibilityReport, Quadric};
use crate::status::Status;
use crate::symplectic::{self, Lagrangian, LagrangianLoop, SymplecticSpace};
use nalgebra::Complex;
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// A `d`-dimensional subspace of quadrics given by an ordered basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Pencil {
    pub dim: usize,
    pub basis: Vec<Mat>,
}

impl Pencil {
    pub fn new(basis: Vec<Mat>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::DegenerateBasis("empty pencil".into()));
        }
        let dim = basis[0].nrows();
        let mut clean = Vec::with_capacity(basis.len());
        for b in basis {
            let q = Quadric::new(b)?;
            if q.dim != dim {
                return Err(Error::Malformed("pencil basis matrices differ in dimension".into()));
            }
            clean.push(q.mat);
        }
        if linalg::sym_rank(&clean, 1e-10) < clean.len() {
            return Err(Error::DegenerateBasis("pencil basis is linearly dependent".into()));
        }
        Ok(Pencil { dim, basis: clean })
    }

    pub fn from_quadrics(q: &[Quadric]) -> Result<Self> {
        Pencil::new(q.iter().map(|x| x.mat.clone()).collect())
    }

    pub fn d(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.dim / 2
    }

    pub fn element(&self, c: &[f64]) -> Mat {
        let mut m = Mat::zeros(self.dim, self.dim);
        for (b, &x) in self.basis.iter().zip(c) {
            m += b * x;
        }
        m
    }

    /// Frobenius-orthonormal basis of the same subspace.
    /// Orthonormal basis in the trace pairing; for a plane given by two
    /// independent quadrics it is Gram–Schmidt in the given order, so the
    /// orientation of the boundary loop follows the basis.
    pub fn orthonormal_basis(&self) -> Vec<Mat> {
        if self.basis.len() == 2 {
            let e0 = &self.basis[0] / self.basis[0].norm();
            let r = &self.basis[1] - &e0 * linalg::trace_pair(&e0, &self.basis[1]);
            if r.norm() > 1e-12 * self.basis[1].norm() {
                return vec![e0, &r / r.norm()];
            }
        }
        linalg::sym_span_basis(&self.basis, 1e-12)
    }

    /// `cos θ·E_1 + sin θ·E_2` for the orthonormal basis of a plane.
    pub fn ray(&self, theta: f64) -> Mat {
        let e = self.orthonormal_basis();
        &e[0] * theta.cos() + &e[1] * theta.sin()
    }

    /// `g·P = {g^{-T} q g^{-1}}`.
    pub fn act(&self, g: &Mat) -> Result<Pencil> {
        let basis = self
            .basis
            .iter()
            .map(|b| Quadric { dim: self.dim, mat: b.clone() }.act(g).map(|q| q.mat))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pencil { dim: self.dim, basis })
    }

    /// Distance from `q` to the span, relative to `‖q‖`.
    pub fn residual(&self, q: &Mat) -> f64 {
        let e = self.orthonormal_basis();
        let mut r = q.clone();
        for b in &e {
            r -= b * linalg::trace_pair(b, q);
        }
        r.norm() / q.norm().max(1e-300)
    }

    /// Coordinates of `q` in the basis (least squares).
    pub fn coordinates(&self, q: &Mat) -> Vec<f64> {
        let cols: Vec<Vct> = self.basis.iter().map(linalg::sym_to_vec).collect();
        let a = Mat::from_columns(&cols);
        let b = linalg::sym_to_vec(q);
        let svd = a.svd(true, true);
        svd.solve(&b, 1e-14).map(|x| x.iter().copied().collect()).unwrap_or_else(|_| vec![0.0; self.d()])
    }

    /// Largest principal angle between the two subspaces of `Q`.
    pub fn distance(&self, other: &Pencil) -> f64 {
        let a = Mat::from_columns(&self.basis.iter().map(linalg::sym_to_vec).collect::<Vec<_>>());
        let b = Mat::from_columns(&other.basis.iter().map(linalg::sym_to_vec).collect::<Vec<_>>());
        linalg::subspace_distance(&a, &b)
    }
}

/// Basis of `P° = {p : Tr(q p) = 0 ∀q ∈ P}`, orthonormal for the trace product.
pub fn annihilator(p: &Pencil) -> Vec<quadrics::SymTensor> {
    linalg::sym_annihilator(&p.basis, p.dim, 1e-10)
        .into_iter()
        .map(|m| {
            let positive = linalg::lambda_min(&m).0 > 0.0;
            quadrics::SymTensor { dim: p.dim, mat: m, positive }
        })
        .collect()
}

/// Per-level statuses of the tower, with witnesses.
#[derive(Debug, Clone, Serialize)]
pub struct PencilClass {
    pub mixed: Status,
    pub nn_regular: Status,
    pub omega_regular: Status,
    pub maximal: Status,
    /// `max_θ λ_min(q_θ)` (negative for mixed planes).
    pub mixed_margin: f64,
    /// `min |Im μ|` over the generalized eigenvalues `μ` of (A, B).
    pub nn_margin: f64,
    /// Smallest certified `λ_min(q_θ|ξ(θ))` minus the Weyl slack.
    pub omega_margin: Option<f64>,
    pub winding: Option<i64>,
    /// Lagrangians on which `q_0` is positive and negative.
    #[serde(skip)]
    pub witnesses: Option<(Lagrangian, Lagrangian)>,
    #[serde(skip)]
    pub boundary: Option<LagrangianLoop>,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions {
    pub tol: f64,
    /// Samples of the boundary loop.
    pub loop_samples: usize,
    pub seed: u64,
    /// Random restarts per failed witness search.
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions { tol: quadrics::EIG_TOL, loop_samples: 128, seed: 0x5eed, restarts: 12, iterations: 300 }
    }
}

/// Unitary-symplectic `K = [[Re U, −Im U], [Im U, Re U]]` whose first `n`
/// columns are an orthonormal frame of `ℓ`.
fn unitary_frame(l: &Lagrangian) -> Mat {
    let f = l.orthonormal_frame();
    let n = l.n();
    let mut k = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let x = f[(i, j)];
            let y = f[(n + i, j)];
            k[(i, j)] = x;
            k[(n + i, j)] = y;
            k[(i, n + j)] = -y;
            k[(n + i, n + j)] = x;
        }
    }
    k
}

fn random_unitary_lagrangian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Lagrangian {
    let re = linalg::gaussian_matrix(rng, n, n);
    let im = linalg::gaussian_matrix(rng, n, n);
    let z = nalgebra::DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| Complex::new(re[(i, j)], im[(i, j)]));
    let q = z.qr().q();
    let mut f = Mat::zeros(2 * n, n);
    for i in 0..n {
        for j in 0..n {
            f[(i, j)] = q[(i, j)].re;
            f[(n + i, j)] = q[(i, j)].im;
        }
    }
    Lagrangian { frame: f }
}

/// `λ_min` of `q` on the Lagrangian `K·[I; S]`, with its gradient in `S`.
fn chart_objective(qk: &Mat, s: &Mat) -> (f64, Mat) {
    let n = s.nrows();
    let mut w = Mat::zeros(2 * n, n);
    w.view_mut((0, 0), (n, n)).copy_from(&Mat::identity(n, n));
    w.view_mut((n, 0), (n, n)).copy_from(s);
    let m = w.transpose() * qk * &w;
    let g = Mat::identity(n, n) + s.transpose() * s;
    // generalized eigenproblem via Cholesky of the Gram matrix
    let l = g.clone().cholesky().expect("I + S² is positive definite").l();
    let li = l.clone().try_inverse().expect("invertible Cholesky factor");
    let red = linalg::symmetrize(&(&li * &m * li.transpose()));
    let (mu, z) = linalg::lambda_min(&red);
    let u = li.transpose() * z;
    let wu = &w * &u;
    let r = (qk * &wu - &wu * mu).rows(n, n).into_owned();
    let denom = wu.norm_squared().max(1e-300);
    let grad = (&r * u.transpose() + &u * r.transpose()) / denom;
    (mu, grad)
}

/// Ascent of `λ_min(q|ℓ)` over Lagrangians from `start`; re-centers the chart
/// when the graph coordinate grows.
pub fn positive_lagrangian_ascent(q: &Mat, start: &Lagrangian, iterations: usize, target: f64) -> (Lagrangian, f64) {
    let n = start.n();
    let mut k = unitary_frame(start);
    let mut qk = k.transpose() * q * &k;
    let mut s = Mat::zeros(n, n);
    let (mut f, mut g) = chart_objective(&qk, &s);
    let mut step = 0.5;
    for _ in 0..iterations {
        if f > target {
            break;
        }
        let gn = g.norm();
        if gn < 1e-14 || step < 1e-12 {
            break;
        }
        let trial = &s + &g * (step / gn);
        let (ft, gt) = chart_objective(&qk, &trial);
        if ft > f {
            s = trial;
            f = ft;
            g = gt;
            step = (step * 1.5).min(1.0);
        } else {
            step *= 0.5;
        }
        if s.norm() > 2.0 {
            let l = chart_lagrangian(&k, &s);
            k = unitary_frame(&l);
            qk = k.transpose() * q * &k;
            s = Mat::zeros(n, n);
            let r = chart_objective(&qk, &s);
            f = r.0;
            g = r.1;
        }
    }
    (chart_lagrangian(&k, &s), f)
}

fn chart_lagrangian(k: &Mat, s: &Mat) -> Lagrangian {
    let n = s.nrows();
    let mut w = Mat::zeros(2 * n, n);
    w.view_mut((0, 0), (n, n)).copy_from(&Mat::identity(n, n));
    w.view_mut((n, 0), (n, n)).copy_from(s);
    Lagrangian { frame: linalg::orthonormalize(&(k * w)) }
}

/// Straight path from `la` to `lb` in the graph chart of `la`, sampled finely
/// enough to keep steps below the loop threshold; `None` unless every sample
/// is positive for the quadric at its interpolated angle.
fn chart_path(la: &Lagrangian, lb: &Lagrangian, a: f64, b: f64, q_at: &dyn Fn(f64) -> Mat) -> Option<Vec<(f64, Lagrangian)>> {
    let n = la.n();
    let k = unitary_frame(la);
    let c = k.transpose() * lb.orthonormal_frame();
    let top = c.rows(0, n).into_owned().try_inverse()?;
    let s = c.rows(n, n) * top;
    let steps = ((la.distance(lb) / (LOOP_STEP / 4.0)).ceil() as usize).max(2);
    let mut out = Vec::with_capacity(steps);
    for i in 1..steps {
        let t = i as f64 / steps as f64;
        let l = chart_lagrangian(&k, &(&s * t));
        let th = a + t * (b - a);
        if lagrangian_margin(&q_at(th), &l) <= 0.0 {
            return None;
        }
        out.push((th, l));
    }
    Some(out)
}

/// `λ_min` of `q` restricted to an orthonormal frame of `ℓ`.
pub fn lagrangian_margin(q: &Mat, l: &Lagrangian) -> f64 {
    let f = l.orthonormal_frame();
    linalg::lambda_min(&(f.transpose() * q * &f)).0
}

/// Search for a Lagrangian on which `q` is positive definite.
pub fn find_positive_lagrangian<R: Rng + ?Sized>(
    q: &Mat,
    warm: Option<&Lagrangian>,
    restarts: usize,
    iterations: usize,
    target: f64,
    rng: &mut R,
) -> Option<(Lagrangian, f64)> {
    let n = q.nrows() / 2;
    let mut best: Option<(Lagrangian, f64)> = None;
    let consider = |l: Lagrangian, f: f64, best: &mut Option<(Lagrangian, f64)>| {
        if best.as_ref().is_none_or(|b| f > b.1) {
            *best = Some((l, f));
        }
    };
    if let Some(w) = warm {
        let (l, f) = positive_lagrangian_ascent(q, w, iterations, target);
        if f > 0.0 {
            return Some((l, f));
        }
        consider(l, f, &mut best);
    }
    for _ in 0..restarts {
        let start = random_unitary_lagrangian(rng, n);
        let (l, f) = positive_lagrangian_ascent(q, &start, iterations, target);
        consider(l, f, &mut best);
        if best.as_ref().unwrap().1 > target {
            break;
        }
    }
    best.filter(|b| b.1 > 0.0)
}

/// Gap of the boundary loop certification on one θ-cell.
#[derive(Debug, Clone)]
pub struct LoopReport {
    pub boundary: Option<LagrangianLoop>,
    /// Smallest `margin(θ_j) − h·L` over cells; positive certifies ω-regularity.
    pub certified_margin: f64,
    pub failed_at: Option<f64>,
}

/// Witness distance above which a loop cell is bisected.
const LOOP_STEP: f64 = PI / 16.0;
/// Bisection depth per loop cell.
const LOOP_DEPTH: usize = 8;

/// Continuation of positive Lagrangians `ξ_P(θ)` for `q_θ` over a `k`-grid.
pub fn boundary_loop(p: &Pencil, k: usize) -> Result<LagrangianLoop> {
    let r = boundary_loop_report(p, k, &ClassifyOptions::default())?;
    match (r.boundary, r.failed_at) {
        (Some(b), _) => Ok(b),
        (None, Some(t)) => Err(Error::Exhausted(format!("no positive Lagrangian found at θ = {t:.6}"))),
        (None, None) => Err(Error::Exhausted("boundary loop did not close".into())),
    }
}

/// Symplectic `g` for which `g·P` is balanced: `Σ E_i²` over an orthonormal
/// basis of `g·P` is close to symplectic. Every level of the tower is
/// invariant under this change, and it undoes the conditioning that
/// `ι(h)·P` inherits from a far translation `h`.
pub fn symplectic_normalizer(p: &Pencil) -> Mat {
    let d = p.dim;
    let mut g = Mat::identity(d, d);
    let mut cur = p.clone();
    for _ in 0..NORMALIZER_ROUNDS {
        let e = cur.orthonormal_basis();
        let m = e.iter().fold(Mat::zeros(d, d), |acc, x| acc + x * x);
        let Ok(x) = symplectic::sp_retract(&m) else { break };
        let (half, _) = linalg::sqrt_and_inv_sqrt(&x);
        if (&half - Mat::identity(d, d)).norm() < 1e-10 {
            break;
        }
        let Ok(next) = cur.act(&half) else { break };
        g = &half * g;
        cur = next;
    }
    g
}

const NORMALIZER_ROUNDS: usize = 8;

/// Bisection depth of the Lipschitz certificate per grid cell.
const CERT_DEPTH: usize = 6;

pub fn boundary_loop_report(p: &Pencil, k: usize, opts: &ClassifyOptions) -> Result<LoopReport> {
    if p.d() != 2 {
        return Err(Error::Precondition("boundary loops are defined for planes".into()));
    }
    if k < 8 {
        return Err(Error::Precondition("boundary loop needs at least 8 samples".into()));
    }
    let g = symplectic_normalizer(p);
    let mut r = normalized_loop_report(&p.act(&g)?, k, opts)?;
    if let Some(lp) = r.boundary.take() {
        let gi = g.try_inverse().ok_or_else(|| Error::Exhausted("normalizer is singular".into()))?;
        r.boundary = Some(lp.act(&gi));
    }
    Ok(r)
}

fn normalized_loop_report(p: &Pencil, k: usize, opts: &ClassifyOptions) -> Result<LoopReport> {
    let e = p.orthonormal_basis();
    let lip = linalg::spectral_norm(&e[0]) + linalg::spectral_norm(&e[1]);
    let mut rng = linalg::rng(opts.seed);
    let mut coarse: Vec<(f64, Lagrangian, f64)> = Vec::with_capacity(k);
    let h = PI / k as f64;
    // full ascent: the maximizer of λ_min moves continuously, a thresholded one lags
    let target = f64::INFINITY;
    let q_at = |th: f64| &e[0] * th.cos() + &e[1] * th.sin();
    for j in 0..k {
        let th = TAU * j as f64 / k as f64;
        let warm = coarse.last().map(|c| c.1.clone());
        let found = find_positive_lagrangian(&q_at(th), warm.as_ref(), opts.restarts, opts.iterations, target, &mut rng);
        let Some((l, m)) = found else {
            return Ok(LoopReport { boundary: None, certified_margin: f64::NEG_INFINITY, failed_at: Some(th) });
        };
        coarse.push((th, l, m));
    }
    // Lipschitz certificate on each cell [θ_j − h, θ_j + h], bisected where too weak
    let mut certified = f64::INFINITY;
    for (th, l, m) in &coarse {
        let mut cells = vec![(*th, h, l.clone(), *m, 0usize)];
        while let Some((c, r, l, m, depth)) = cells.pop() {
            if m - r * lip > 0.0 || depth >= CERT_DEPTH {
                certified = certified.min(m - r * lip);
                continue;
            }
            for side in [-0.5, 0.5] {
                let cc = c + side * r;
                let (l2, m2) = positive_lagrangian_ascent(&q_at(cc), &l, opts.iterations, target);
                cells.push((cc, 0.5 * r, l2, m2, depth + 1));
            }
        }
    }
    // bisect cells whose endpoint witnesses are far apart
    let mut samples = Vec::with_capacity(k);
    let mut params = Vec::with_capacity(k);
    for j in 0..k {
        let (t0, l0, _) = &coarse[j];
        let (t1, l1) = if j + 1 < k { (coarse[j + 1].0, &coarse[j + 1].1) } else { (TAU, &coarse[0].1) };
        samples.push(l0.clone());
        params.push(*t0);
        let mut stack = vec![(*t0, l0.clone(), t1, l1.clone(), 0usize)];
        let mut inserted: Vec<(f64, Lagrangian)> = Vec::new();
        while let Some((a, la, b, lb, depth)) = stack.pop() {
            if la.distance(&lb) < LOOP_STEP {
                continue;
            }
            if depth >= LOOP_DEPTH {
                // the maximizer moved non-smoothly: join the witnesses inside the positive set
                match chart_path(&la, &lb, a, b, &q_at) {
                    Some(path) => inserted.extend(path),
                    None => return Ok(LoopReport { boundary: None, certified_margin: certified, failed_at: Some(a) }),
                }
                continue;
            }
            let mid = 0.5 * (a + b);
            let (lm, mm) = positive_lagrangian_ascent(&q_at(mid), &la, opts.iterations * 2, target);
            if mm <= 0.0 {
                return Ok(LoopReport { boundary: None, certified_margin: certified.min(mm), failed_at: Some(mid) });
            }
            inserted.push((mid, lm.clone()));
            stack.push((mid, lm.clone(), b, lb, depth + 1));
            stack.push((a, la, mid, lm, depth + 1));
        }
        inserted.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (t, l) in inserted {
            params.push(t);
            samples.push(l);
        }
    }
    let lp = LagrangianLoop { samples, params };
    if lp.max_step() >= PI / 8.0 {
        return Ok(LoopReport { boundary: None, certified_margin: certified, failed_at: None });
    }
    Ok(LoopReport { boundary: Some(lp), certified_margin: certified, failed_at: None })
}

/// Generalized eigenvalues of `B^{-1}A`.
fn generalized_eigenvalues(a: &Mat, b: &Mat) -> Option<Vec<Complex<f64>>> {
    let bi = b.clone().try_inverse()?;
    let m = bi * a;
    Some(m.complex_eigenvalues().iter().copied().collect())
}

/// The classification tower of a plane of quadrics, computed bottom-up.
/// Margins refer to the balanced representative `g·P` (see
/// [`symplectic_normalizer`]); witnesses and the boundary loop are mapped
/// back to `P`.
pub fn classify(p: &Pencil, opts: &ClassifyOptions) -> Result<PencilClass> {
    if p.d() != 2 {
        return Err(Error::Precondition("classification is implemented for planes".into()));
    }
    let g = symplectic_normalizer(p);
    let mut class = classify_balanced(&p.act(&g)?, opts)?;
    if class.witnesses.is_some() || class.boundary.is_some() {
        let gi = g.try_inverse().ok_or_else(|| Error::Exhausted("normalizer is singular".into()))?;
        class.witnesses = class.witnesses.map(|(a, b)| (a.act(&gi), b.act(&gi)));
        class.boundary = class.boundary.map(|lp| lp.act(&gi));
    }
    Ok(class)
}

fn classify_balanced(p: &Pencil, opts: &ClassifyOptions) -> Result<PencilClass> {
    let n = p.n();
    let e = p.orthonormal_basis();
    let sweep = quadrics::circle_sweep(&e[0], &e[1], opts.tol)?;
    let mut class = PencilClass {
        mixed: sweep.mixed,
        nn_regular: Status::Inconclusive,
        omega_regular: Status::Inconclusive,
        maximal: Status::Inconclusive,
        mixed_margin: sweep.max_lambda_min,
        nn_margin: 0.0,
        omega_margin: None,
        winding: None,
        witnesses: None,
        boundary: None,
    };
    if class.mixed.is_false() {
        class.nn_regular = Status::False;
        class.omega_regular = Status::False;
        class.maximal = Status::False;
        return Ok(class);
    }
    // nondegenerate reference element B and its orthogonal partner A
    let mut best = (0.0, f64::NEG_INFINITY);
    for j in 0..64 {
        let th = PI * j as f64 / 64.0;
        let ev = linalg::sym_eigenvalues(&(&e[0] * th.cos() + &e[1] * th.sin()));
        let m = ev.iter().fold(f64::INFINITY, |a, &x| a.min(x.abs()));
        if m > best.1 {
            best = (th, m);
        }
    }
    let th = best.0;
    let b = &e[0] * th.cos() + &e[1] * th.sin();
    let a = &e[1] * th.cos() - &e[0] * th.sin();
    let sig = quadrics::signature_of(&b, opts.tol);
    let nn = if !sig.is_balanced(n) {
        class.nn_margin = 0.0;
        Status::False
    } else if let Some(mu) = generalized_eigenvalues(&a, &b) {
        let scale = mu.iter().fold(1.0f64, |s, z| s.max(z.norm()));
        let min_im = mu.iter().fold(f64::INFINITY, |s, z| s.min(z.im.abs()));
        class.nn_margin = min_im;
        if min_im > 1e-6 * scale {
            Status::True
        } else {
            // a real eigenvalue μ makes A − μB singular
            let z = mu.iter().min_by(|x, y| x.im.abs().total_cmp(&y.im.abs())).unwrap();
            let d = &a - &b * z.re;
            let ev = linalg::sym_eigenvalues(&d);
            let small = ev.iter().fold(f64::INFINITY, |s, x| s.min(x.abs()));
            if small <= 1e-8 * linalg::spectral_norm(&d).max(1e-300) || sweep.degeneracy_free.is_false() {
                Status::False
            } else {
                Status::Inconclusive
            }
        }
    } else {
        Status::Inconclusive
    };
    class.nn_regular = nn.and(if class.mixed.is_true() { Status::True } else { Status::Inconclusive });
    if nn.is_false() {
        class.omega_regular = Status::False;
        class.maximal = Status::False;
        return Ok(class);
    }
    if !class.nn_regular.is_true() {
        return Ok(class);
    }
    let lr = boundary_loop_report(p, opts.loop_samples, opts)?;
    class.omega_margin = Some(lr.certified_margin);
    let Some(lp) = lr.boundary else {
        return Ok(class);
    };
    let half = opts.loop_samples / 2;
    class.witnesses = Some((lp.samples[0].clone(), lp.samples[half].clone()));
    class.omega_regular = if lr.certified_margin > 0.0 { Status::True } else { Status::Inconclusive };
    match symplectic::maslov_winding(&lp) {
        Ok(w) => {
            class.winding = Some(w);
            class.maximal = if !class.omega_regular.is_true() {
                Status::Inconclusive
            } else {
                Status::from_bool(w.unsigned_abs() as usize == n)
            };
        }
        Err(_) => class.maximal = Status::Inconclusive,
    }
    class.boundary = Some(lp);
    Ok(class)
}

/// Tangent vector at a pencil: representatives of `v(q_i) ∈ Q/P`.
#[derive(Debug, Clone)]
pub struct TangentVector {
    pub base: Pencil,
    pub images: Vec<Mat>,
}

impl TangentVector {
    /// Stores the images reduced against the base (trace-orthogonal complement).
    pub fn new(base: Pencil, images: Vec<Mat>) -> Result<Self> {
        if images.len() != base.d() {
            return Err(Error::Malformed("one image per basis quadric required".into()));
        }
        let e = base.orthonormal_basis();
        let images = images
            .into_iter()
            .map(|m| {
                let mut r = linalg::symmetrize(&m);
                for b in &e {
                    r -= b * linalg::trace_pair(b, &m);
                }
                r
            })
            .collect();
        Ok(TangentVector { base, images })
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        let s = self.base.basis.iter().map(|b| b.norm()).fold(0.0, f64::max);
        self.images.iter().all(|m| m.norm() <= tol * s)
    }

    /// The point `exp_t`: the pencil spanned by `q_i + t v(q_i)`.
    pub fn curve(&self, t: f64) -> Result<Pencil> {
        Pencil::new(self.base.basis.iter().zip(&self.images).map(|(b, v)| b + v * t).collect())
    }
}

/// Result of a fitting test.
#[derive(Debug, Clone)]
pub struct FittingReport {
    pub fitting: Status,
    /// `(q_1, q_2)` with `q_2 − q_1` positive definite.
    pub witness: Option<(Mat, Mat)>,
    pub feasibility: Option<FeasibilityReport>,
    /// Independent sampled check of `{q_1 ≥ 0} ⊂ {q_2 > 0}`.
    pub geometric: Option<Status>,
}

fn require_mixed(p: &Pencil, tol: f64) -> Result<()> {
    let st = mixed_status(p, tol)?;
    if !st.is_true() {
        return Err(Error::Precondition(format!("pencil is not certified mixed ({st})")));
    }
    Ok(())
}

/// Mixedness for any `d`: planes by circle sweep, otherwise `P°` meets the
/// positive cone.
pub fn mixed_status(p: &Pencil, tol: f64) -> Result<Status> {
    if p.d() == 2 {
        let e = p.orthonormal_basis();
        return Ok(quadrics::circle_sweep(&e[0], &e[1], tol)?.mixed);
    }
    if p.d() == 1 {
        let ev = linalg::sym_eigenvalues(&p.basis[0]);
        let sc = ev.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        return Ok(Status::from_bool(ev[0] < -tol * sc && ev[ev.len() - 1] > tol * sc));
    }
    let ann: Vec<Mat> = annihilator(p).into_iter().map(|t| t.mat).collect();
    if ann.is_empty() {
        return Ok(Status::False);
    }
    Ok(quadrics::pd_feasibility(&ann, &FeasibilityOptions::default())?.status)
}

/// Union basis reduced by rank, with the coordinates of each reduced element
/// in the original list.
fn reduced_union(mats: &[Mat]) -> Vec<Mat> {
    linalg::sym_span_basis(mats, 1e-10)
}

/// Decompose `w ∈ P_1 + P_2` as `q_2 − q_1`.
fn split_witness(p1: &Pencil, p2: &Pencil, w: &Mat) -> (Mat, Mat) {
    let mut all = p1.basis.clone();
    all.extend(p2.basis.iter().cloned());
    let cols: Vec<Vct> = all.iter().map(linalg::sym_to_vec).collect();
    let a = Mat::from_columns(&cols);
    let c = a.svd(true, true).solve(&linalg::sym_to_vec(w), 1e-12).expect("least squares solve");
    let d1 = p1.d();
    let q1 = -p1.element(&c.as_slice()[..d1]);
    let q2 = p2.element(&c.as_slice()[d1..]);
    (q1, q2)
}

/// Fitting test for a pair of pencils: does `P_1 + P_2` contain a positive definite form?
pub fn fitting_pair(p1: &Pencil, p2: &Pencil, opts: &FeasibilityOptions) -> Result<FittingReport> {
    if p1.dim != p2.dim {
        return Err(Error::Malformed("pencils live in different dimensions".into()));
    }
    require_mixed(p1, quadrics::EIG_TOL)?;
    require_mixed(p2, quadrics::EIG_TOL)?;
    let mut all = p1.basis.clone();
    all.extend(p2.basis.iter().cloned());
    let basis = reduced_union(&all);
    let rep = quadrics::pd_feasibility(&basis, opts)?;
    let witness = rep.witness.as_ref().map(|w| {
        let m = {
            let mut m = Mat::zeros(p1.dim, p1.dim);
            for (b, &c) in basis.iter().zip(&w.coeffs) {
                m += b * c;
            }
            m
        };
        split_witness(p1, p2, &m)
    });
    Ok(FittingReport { fitting: rep.status, witness, feasibility: Some(rep), geometric: None })
}

/// Sampled check that `{q_1 ≥ 0} ⊂ {q_2 > 0}` on unit vectors: returns the
/// largest `min(q_1(v), −q_2(v))` found (negative means the inclusion held
/// on every sample).
pub fn inclusion_violation<R: Rng + ?Sized>(q1: &Mat, q2: &Mat, samples: usize, rng: &mut R) -> f64 {
    let d = q1.nrows();
    let mut best = f64::NEG_INFINITY;
    let mut best_v = Vct::zeros(d);
    for _ in 0..samples {
        let v = linalg::unit_vector(rng, d);
        let s = (v.dot(&(q1 * &v))).min(-v.dot(&(q2 * &v)));
        if s > best {
            best = s;
            best_v = v;
        }
    }
    let (v, s) = refine_violation(q1, q2, &best_v);
    let _ = v;
    best.max(s)
}

/// Local ascent of `min(q_1(v), −q_2(v))` on the unit sphere.
fn refine_violation(q1: &Mat, q2: &Mat, v0: &Vct) -> (Vct, f64) {
    let f = |v: &Vct| (v.dot(&(q1 * v))).min(-v.dot(&(q2 * v)));
    let mut v = v0.normalize();
    let mut fv = f(&v);
    let mut step = 0.3;
    for _ in 0..200 {
        let a = v.dot(&(q1 * &v));
        let b = -v.dot(&(q2 * &v));
        // gradient of the active branch (average on ties)
        let ga = q1 * &v * 2.0;
        let gb = q2 * &v * -2.0;
        let g = if (a - b).abs() < 1e-9 { (ga + gb) * 0.5 } else if a < b { ga } else { gb };
        let g = &g - &v * g.dot(&v);
        if g.norm() < 1e-14 {
            break;
        }
        let trial = (&v + g.normalize() * step).normalize();
        let ft = f(&trial);
        if ft > fv {
            v = trial;
            fv = ft;
            step *= 1.3;
        } else {
            step *= 0.5;
            if step < 1e-10 {
                break;
            }
        }
    }
    (v, fv)
}

/// Sampling oracle for the geometric fitting criterion on planes: some
/// `q_1 ∈ P_1`, `q_2 ∈ P_2` have `{q_1 ≥ 0} ⊂ {q_2 > 0}`.
///
/// With `q_1 = cos α A_1 + sin α B_1` and `q_2 = cos β A_2 + sin β B_2`, a
/// sampled unit vector `v` rules out the closed set of `(α, β)` where
/// `q_1(v) ≥ 0` and `q_2(v) ≤ 0`. If rank-one samples rule out the whole torus
/// the pair is certified non-fitting; otherwise the best surviving `(α, β)` is
/// checked by local search for a violating vector, adding found violators and
/// retrying.
pub fn geometric_fitting<R: Rng + ?Sized>(p1: &Pencil, p2: &Pencil, samples: usize, rng: &mut R) -> Result<(Status, Option<(Mat, Mat)>)> {
    if p1.d() != 2 || p2.d() != 2 {
        return Err(Error::Precondition("geometric oracle is implemented for planes".into()));
    }
    let e1 = p1.orthonormal_basis();
    let e2 = p2.orthonormal_basis();
    let d = p1.dim;
    let mut pts: Vec<[f64; 4]> = Vec::with_capacity(samples);
    let mut sample_vecs: Vec<Vct> = Vec::with_capacity(samples);
    let eval = |v: &Vct| -> [f64; 4] {
        [v.dot(&(&e1[0] * v)), v.dot(&(&e1[1] * v)), v.dot(&(&e2[0] * v)), v.dot(&(&e2[1] * v))]
    };
    for _ in 0..samples {
        let v = linalg::unit_vector(rng, d);
        pts.push(eval(&v));
        sample_vecs.push(v);
    }
    let cells = 256usize;
    let grid = 96usize;
    for _round in 0..10 {
        // covering certificate over α-cells
        let hw = PI / cells as f64;
        let mut covered_all = true;
        for c in 0..cells {
            let ac = TAU * (c as f64 + 0.5) / cells as f64;
            let mut centers: Vec<f64> = Vec::new();
            for p in &pts {
                let r1 = (p[0] * p[0] + p[1] * p[1]).sqrt();
                let r2 = (p[2] * p[2] + p[3] * p[3]).sqrt();
                if r1 < 1e-12 || r2 < 1e-12 {
                    continue;
                }
                let th = p[1].atan2(p[0]);
                if linalg::wrap_angle(ac - th).abs() <= PI / 2.0 - hw {
                    // q_2(v) ≤ 0 on the closed semicircle centered opposite to φ_p
                    centers.push((p[3].atan2(p[2]) + PI).rem_euclid(TAU));
                }
            }
            if centers.len() < 2 {
                covered_all = false;
                break;
            }
            centers.sort_by(f64::total_cmp);
            let mut gap: f64 = TAU - centers[centers.len() - 1] + centers[0];
            for w in centers.windows(2) {
                gap = gap.max(w[1] - w[0]);
            }
            if gap >= PI - 1e-9 {
                covered_all = false;
                break;
            }
        }
        if covered_all {
            return Ok((Status::False, None));
        }
        // best surviving (α, β) on a grid
        let mut best = (0.0, 0.0, f64::INFINITY);
        for i in 0..grid {
            let a = TAU * i as f64 / grid as f64;
            let (sa, ca) = a.sin_cos();
            for j in 0..grid {
                let b = TAU * j as f64 / grid as f64;
                let (sb, cb) = b.sin_cos();
                let g = pts
                    .iter()
                    .map(|p| (ca * p[0] + sa * p[1]).min(-(cb * p[2] + sb * p[3])))
                    .fold(f64::NEG_INFINITY, f64::max);
                if g < best.2 {
                    best = (a, b, g);
                }
            }
        }
        let q1 = &e1[0] * best.0.cos() + &e1[1] * best.0.sin();
        let q2 = &e2[0] * best.1.cos() + &e2[1] * best.1.sin();
        // search for violators of the candidate inclusion
        let mut worst = f64::NEG_INFINITY;
        let mut new_pts = Vec::new();
        let mut order: Vec<usize> = (0..pts.len()).collect();
        let score = |p: &[f64; 4]| {
            let a = best.0.cos() * p[0] + best.0.sin() * p[1];
            let b = -(best.1.cos() * p[2] + best.1.sin() * p[3]);
            a.min(b)
        };
        order.sort_by(|&x, &y| score(&pts[y]).total_cmp(&score(&pts[x])));
        let mut starts: Vec<Vct> = order.iter().take(48).map(|&i| sample_vecs[i].clone()).collect();
        for _ in 0..48 {
            starts.push(linalg::unit_vector(rng, d));
        }
        for v0 in &starts {
            let (v, s) = refine_violation(&q1, &q2, v0);
            worst = worst.max(s);
            if s >= 0.0 {
                new_pts.push(v);
            }
        }
        if worst < -1e-9 && best.2 < -1e-9 {
            return Ok((Status::True, Some((q1, q2))));
        }
        if new_pts.is_empty() {
            if best.2 >= -1e-9 {
                // grid optimum not strictly negative: densify samples
                for _ in 0..samples / 2 {
                    let v = linalg::unit_vector(rng, d);
                    pts.push(eval(&v));
                    sample_vecs.push(v);
                }
            } else {
                return Ok((Status::Inconclusive, None));
            }
        }
        for v in new_pts {
            pts.push(eval(&v));
            sample_vecs.push(v);
        }
    }
    Ok((Status::Inconclusive, None))
}

/// Fitting test for a tangent direction: does `Im(v) + P` contain a positive definite form?
/// The dual optimum is `max λ_min` over trace-one tensors of `Ker(v°)`.
pub fn fitting_direction(v: &TangentVector, opts: &FeasibilityOptions) -> Result<FittingReport> {
    require_mixed(&v.base, quadrics::EIG_TOL)?;
    if v.is_zero(1e-12) {
        return Ok(FittingReport { fitting: Status::False, witness: None, feasibility: None, geometric: None });
    }
    let mut all = v.base.basis.clone();
    all.extend(v.images.iter().cloned());
    let basis = reduced_union(&all);
    let rep = quadrics::pd_feasibility(&basis, opts)?;
    let witness = rep.witness.as_ref().map(|w| {
        let mut m = Mat::zeros(v.base.dim, v.base.dim);
        for (b, &c) in basis.iter().zip(&w.coeffs) {
            m += b * c;
        }
        (Mat::zeros(v.base.dim, v.base.dim), m)
    });
    Ok(FittingReport { fitting: rep.status, witness, feasibility: Some(rep), geometric: None })
}

/// Random plane spanned by two random symmetric matrices.
pub fn random_pencil<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Pencil {
    loop {
        let a = linalg::random_symmetric(rng, dim);
        let b = linalg::random_symmetric(rng, dim);
        if let Ok(p) = Pencil::new(vec![a, b]) {
            return p;
        }
    }
}

/// Random plane conjugated from `span{q, J-rotated q}`-type seeds: a random
/// `Sp`-conjugate of the pair-quadric plane of a Lagrangian circle.
pub fn random_lagrangian_plane<R: Rng + ?Sized>(rng: &mut R, sp: &SymplecticSpace, spread: f64) -> Result<Pencil> {
    let g = symplectic::random_symplectic(rng, sp.n, spread);
    let x = sp.x_lagrangian();
    let y = sp.y_lagrangian();
    let q1 = symplectic::pair_quadric(sp, &x, &y)?;
    let d = sp.graph_lagrangian(&vec![1.0; sp.n]);
    let dm = sp.graph_lagrangian(&vec![-1.0; sp.n]);
    let q2 = symplectic::pair_quadric(sp, &dm, &d)?;
    Pencil::new(vec![q1.mat, q2.mat])?.act(&g)
}
