//! Symmetric forms and tensors: signatures, positive-definite feasibility of
//! subspaces, circle sweeps of planes, the Hilbert metric of the positive cone.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vct};
use crate::status::Status;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Default eigenvalue tolerance, relative to the spectral norm.
pub const EIG_TOL: f64 = 1e-9;
/// Dead band around zero for feasibility optima.
pub const FEAS_BAND: f64 = 1e-7;
/// Below this a rank-deficient dual certificate is accepted as exact.
pub const BOUNDARY_TOL: f64 = 1e-10;

/// Symmetric bilinear form on `R^dim`, `dim` even.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadric {
    pub dim: usize,
    pub mat: Mat,
}

impl Quadric {
    /// Validates shape and symmetry (to `1e-12·‖mat‖`), then stores the
    /// symmetric part.
    pub fn new(mat: Mat) -> Result<Self> {
        check_symmetric(&mat)?;
        let dim = mat.nrows();
        if dim < 2 || dim % 2 != 0 {
            return Err(Error::Malformed(format!("quadric dimension {dim} must be even and at least 2")));
        }
        Ok(Quadric { dim, mat: linalg::symmetrize(&mat) })
    }

    pub fn identity(dim: usize) -> Self {
        Quadric { dim, mat: Mat::identity(dim, dim) }
    }

    pub fn eval(&self, v: &Vct) -> f64 {
        v.dot(&(&self.mat * v))
    }

    pub fn bilinear(&self, v: &Vct, w: &Vct) -> f64 {
        v.dot(&(&self.mat * w))
    }

    /// Push-forward by `g`: `(g·q)(g v) = q(v)`, i.e. `g^{-T} q g^{-1}`.
    pub fn act(&self, g: &Mat) -> Result<Quadric> {
        let gi = g.clone().try_inverse().ok_or_else(|| Error::Malformed("singular group element".into()))?;
        Ok(Quadric { dim: self.dim, mat: linalg::symmetrize(&(gi.transpose() * &self.mat * gi)) })
    }

    pub fn frobenius(&self) -> f64 {
        self.mat.norm()
    }

    pub fn normalized(&self) -> Quadric {
        let n = self.frobenius();
        Quadric { dim: self.dim, mat: &self.mat / n }
    }

    pub fn scaled(&self, s: f64) -> Quadric {
        Quadric { dim: self.dim, mat: &self.mat * s }
    }

    pub fn lambda_min(&self) -> f64 {
        linalg::lambda_min(&self.mat).0
    }
}

fn check_symmetric(mat: &Mat) -> Result<()> {
    if mat.nrows() != mat.ncols() {
        return Err(Error::Malformed(format!("matrix is {}x{}, not square", mat.nrows(), mat.ncols())));
    }
    if mat.iter().any(|x| !x.is_finite()) {
        return Err(Error::Malformed("non-finite entry".into()));
    }
    let scale = linalg::spectral_norm(&linalg::symmetrize(mat)).max(1e-300);
    let asym = (mat - mat.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::Malformed(format!("asymmetry {asym:.3e} exceeds 1e-12 x spectral norm")));
    }
    Ok(())
}

/// Symmetric tensor in `S²V`; `positive` is set only when certified.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    pub dim: usize,
    pub mat: Mat,
    pub positive: bool,
}

impl SymTensor {
    pub fn new(mat: Mat) -> Result<Self> {
        check_symmetric(&mat)?;
        let dim = mat.nrows();
        let m = linalg::symmetrize(&mat);
        let positive = linalg::lambda_min(&m).0 > 0.0;
        Ok(SymTensor { dim, mat: m, positive })
    }

    /// Rank-one tensor `v ⊗ v`.
    pub fn rank_one(v: &Vct) -> Self {
        SymTensor { dim: v.len(), mat: v * v.transpose(), positive: v.len() == 1 && v[0] != 0.0 }
    }

    /// Pairing `q(p) = Tr(q∘p)`.
    pub fn pair(&self, q: &Quadric) -> f64 {
        linalg::trace_pair(&q.mat, &self.mat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Signature {
    pub fn is_balanced(&self, n: usize) -> bool {
        self.pos == n && self.neg == n && self.zero == 0
    }
}

/// Eigenvalue counts; `|λ| ≤ tol·‖q‖` counts as zero.
pub fn signature(q: &Quadric, tol: f64) -> Result<Signature> {
    if !(tol > 0.0) {
        return Err(Error::Precondition("tolerance must be positive".into()));
    }
    check_symmetric(&q.mat)?;
    Ok(signature_of(&q.mat, tol))
}

pub(crate) fn signature_of(m: &Mat, tol: f64) -> Signature {
    let vals = linalg::sym_eigenvalues(m);
    let scale = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cut = tol * scale.max(1e-300);
    let mut s = Signature { pos: 0, neg: 0, zero: 0 };
    for &l in vals.iter() {
        if l > cut {
            s.pos += 1;
        } else if l < -cut {
            s.neg += 1;
        } else {
            s.zero += 1;
        }
    }
    s
}

/// `frameᵀ q frame`.
pub fn restrict(q: &Quadric, frame: &Mat) -> Result<Mat> {
    if frame.nrows() != q.dim {
        return Err(Error::Malformed(format!("frame has {} rows, quadric dimension {}", frame.nrows(), q.dim)));
    }
    let c = linalg::frame_conditioning(frame);
    if c < 1e-10 {
        return Err(Error::RankDeficientFrame(c));
    }
    Ok(linalg::symmetrize(&(frame.transpose() * &q.mat * frame)))
}

/// Restriction as a quadric (requires an even number of frame columns).
pub fn restrict_quadric(q: &Quadric, frame: &Mat) -> Result<Quadric> {
    Quadric::new(restrict(q, frame)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityWitness {
    /// Coordinates in the queried basis.
    pub coeffs: Vec<f64>,
    /// `λ_min` of the reconstructed matrix.
    pub margin: f64,
}

/// Positive semi-definite element of the annihilator, normalized to trace one.
#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub tensor: Mat,
    pub lambda_min: f64,
    /// `max_i |Tr(B_i p)| / ‖B_i‖`.
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub struct FeasibilityReport {
    pub status: Status,
    pub witness: Option<FeasibilityWitness>,
    pub dual: Option<DualCertificate>,
    /// Best `λ_min` found over the unit ball of coefficients.
    pub primal_margin: f64,
    /// Best `λ_min` over trace-one annihilator tensors (`None` if the span
    /// contains the identity direction, which makes the dual slice empty).
    pub dual_margin: Option<f64>,
    pub band: f64,
    pub seed: u64,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> Status {
        self.status
    }
}

#[derive(Debug, Clone, Copy)]
pub struct FeasibilityOptions {
    /// Ascent iterations per restart.
    pub budget: usize,
    pub restarts: usize,
    pub band: f64,
    pub boundary_tol: f64,
    pub seed: u64,
}

impl Default for FeasibilityOptions {
    fn default() -> Self {
        FeasibilityOptions { budget: 400, restarts: 50, band: FEAS_BAND, boundary_tol: BOUNDARY_TOL, seed: 0x5eed }
    }
}

impl FeasibilityOptions {
    pub fn with_budget(budget: usize) -> Self {
        FeasibilityOptions { budget, ..Default::default() }
    }
}

fn combine(basis: &[Mat], c: &[f64]) -> Mat {
    let mut m = Mat::zeros(basis[0].nrows(), basis[0].ncols());
    for (b, &ci) in basis.iter().zip(c) {
        m += b * ci;
    }
    m
}

/// Soft-min supergradient of `λ_min(Σ c_i B_i)`: a convex combination of
/// `u uᵀ` over the low eigenvectors, the plain supergradient when `beta` is large.
fn soft_supergradient(basis: &[Mat], m: &Mat, beta: f64) -> (f64, Vec<f64>) {
    let (vals, vecs) = linalg::sym_eigen(m);
    let lmin = vals[0];
    let mut w: Vec<f64> = vals.iter().map(|&l| (-(l - lmin) * beta).exp()).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    let mut g = vec![0.0; basis.len()];
    for (j, &wj) in w.iter().enumerate() {
        if wj < 1e-14 {
            continue;
        }
        let u = vecs.column(j);
        for (i, b) in basis.iter().enumerate() {
            g[i] += wj * (u.transpose() * b * u)[(0, 0)];
        }
    }
    (lmin, g)
}

fn project_ball(c: &mut [f64]) {
    let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 1.0 {
        c.iter_mut().for_each(|x| *x /= n);
    }
}

/// Concave ascent of `λ_min` over the unit ball of coefficients. Returns the
/// best coefficients and value; `scale` sets the soft-min temperature.
fn ascend_ball<R: Rng>(basis: &[Mat], opts: &FeasibilityOptions, rng: &mut R) -> (Vec<f64>, f64) {
    let k = basis.len();
    let scale: f64 = basis.iter().map(|b| linalg::spectral_norm(b)).fold(0.0, f64::max).max(1e-300);
    let mut best_c = vec![0.0; k];
    let mut best = 0.0f64;
    let mut last_restart_best: Option<f64> = None;
    for r in 0..opts.restarts.max(1) {
        let mut c: Vec<f64> = linalg::unit_vector(rng, k).iter().copied().collect();
        let mut local_best = f64::NEG_INFINITY;
        let mut local_c = c.clone();
        let mut step = 0.5;
        let mut stall = 0;
        for it in 0..opts.budget.max(1) {
            let beta = (20.0 * (1.0 + it as f64)) / scale;
            let m = combine(basis, &c);
            let (lmin, g) = soft_supergradient(basis, &m, beta);
            if lmin > local_best + 1e-15 * scale {
                local_best = lmin;
                local_c = c.clone();
                stall = 0;
            } else {
                stall += 1;
                if stall > 40 {
                    break;
                }
            }
            let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
            let eta = step / (1.0 + it as f64).sqrt();
            for i in 0..k {
                c[i] += eta * g[i] / gn;
            }
            project_ball(&mut c);
            if it % 50 == 49 {
                step *= 0.7;
            }
        }
        if local_best > best || r == 0 {
            if local_best > best {
                best = local_best;
                best_c = local_c.clone();
            }
        }
        // concavity: agreeing restarts have found the global optimum
        if let Some(prev) = last_restart_best {
            if r >= 2 && (prev - local_best).abs() < 1e-9 * scale {
                break;
            }
        }
        last_restart_best = Some(local_best);
    }
    (best_c, best)
}

/// Concave ascent of `λ_min(p0 + Σ a_j N_j)` over the affine slice.
fn ascend_affine(p0: &Mat, dirs: &[Mat], budget: usize) -> (Mat, f64) {
    let k = dirs.len();
    let mut a = vec![0.0; k];
    let eval = |a: &[f64]| {
        let mut m = p0.clone();
        for (d, &x) in dirs.iter().zip(a) {
            m += d * x;
        }
        m
    };
    let scale = linalg::spectral_norm(p0).max(1e-300);
    let mut best = f64::NEG_INFINITY;
    let mut best_a = a.clone();
    if k == 0 {
        let l = linalg::lambda_min(p0).0;
        return (p0.clone(), l);
    }
    let mut step = 0.5 * scale;
    let mut stall = 0;
    for it in 0..budget.max(1) * 4 {
        let m = eval(&a);
        let beta = (20.0 * (1.0 + it as f64)) / scale;
        let (lmin, g) = soft_supergradient(dirs, &m, beta);
        if lmin > best + 1e-15 * scale {
            best = lmin;
            best_a = a.clone();
            stall = 0;
        } else {
            stall += 1;
            if stall > 60 {
                break;
            }
        }
        let gn = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let eta = step / (1.0 + it as f64).sqrt();
        for i in 0..k {
            a[i] += eta * g[i] / gn;
        }
        if it % 50 == 49 {
            step *= 0.7;
        }
    }
    (eval(&best_a), best)
}

/// Decide whether `span(basis)` meets the open positive-definite cone.
///
/// Primal: maximize `λ_min` over the unit ball of coefficients (concave, so
/// restarts agree). Dual: maximize `λ_min` over trace-one tensors annihilating
/// the span. A positive-definite dual optimum certifies infeasibility; a
/// dual optimum that is only semi-definite (within `boundary_tol`) together
/// with a non-positive primal optimum certifies boundary infeasibility.
pub fn pd_feasibility(basis: &[Mat], opts: &FeasibilityOptions) -> Result<FeasibilityReport> {
    if basis.is_empty() {
        return Err(Error::DegenerateBasis("empty basis".into()));
    }
    let dim = basis[0].nrows();
    for b in basis {
        if b.nrows() != dim || b.ncols() != dim {
            return Err(Error::Malformed("basis matrices differ in shape".into()));
        }
        check_symmetric(b)?;
    }
    let nsym = linalg::sym_dim(dim);
    if basis.len() > nsym {
        return Err(Error::DegenerateBasis(format!("{} matrices exceed dim S² = {nsym}", basis.len())));
    }
    let sym: Vec<Mat> = basis.iter().map(linalg::symmetrize).collect();
    if linalg::sym_rank(&sym, 1e-10) < sym.len() {
        return Err(Error::DegenerateBasis("basis matrices are linearly dependent".into()));
    }
    let mut rng = linalg::rng(opts.seed);
    let (c, primal) = ascend_ball(&sym, opts, &mut rng);
    let mut report = FeasibilityReport {
        status: Status::Inconclusive,
        witness: None,
        dual: None,
        primal_margin: primal,
        dual_margin: None,
        band: opts.band,
        seed: opts.seed,
    };
    if primal > opts.band {
        let m = combine(&sym, &c);
        report.witness = Some(FeasibilityWitness { coeffs: c, margin: linalg::lambda_min(&m).0 });
        report.status = Status::True;
        return Ok(report);
    }
    // dual slice {p ∈ span°, Tr p = 1}
    let ann = linalg::sym_annihilator(&sym, dim, 1e-10);
    let traces: Vct = Vct::from_iterator(ann.len(), ann.iter().map(|p| p.trace()));
    let tn = traces.norm();
    if ann.is_empty() || tn < 1e-12 {
        report.status = Status::Inconclusive;
        return Ok(report);
    }
    let mut p0 = Mat::zeros(dim, dim);
    for (p, &t) in ann.iter().zip(traces.iter()) {
        p0 += p * (t / (tn * tn));
    }
    // directions inside the slice: annihilator elements with zero trace
    let tdir = &traces / tn;
    let coords: Vec<Vct> = (0..ann.len())
        .map(|i| {
            let mut e = Vct::zeros(ann.len());
            e[i] = 1.0;
            &e - &tdir * tdir[i]
        })
        .collect();
    let cm = Mat::from_columns(&coords);
    let cb = linalg::range_basis(&cm, 1e-10);
    let dirs: Vec<Mat> = (0..cb.ncols())
        .map(|j| {
            let mut m = Mat::zeros(dim, dim);
            for (i, p) in ann.iter().enumerate() {
                m += p * cb[(i, j)];
            }
            m
        })
        .collect();
    let (p, dual) = ascend_affine(&p0, &dirs, opts.budget);
    let residual = sym
        .iter()
        .map(|b| linalg::trace_pair(b, &p).abs() / b.norm().max(1e-300))
        .fold(0.0, f64::max);
    report.dual_margin = Some(dual);
    report.dual = Some(DualCertificate { tensor: p, lambda_min: dual, residual });
    if dual > opts.band {
        report.status = Status::False;
    } else if dual >= -opts.boundary_tol && primal <= opts.boundary_tol {
        report.status = Status::False;
    } else {
        report.status = Status::Inconclusive;
    }
    Ok(report)
}

/// Report of a sweep over `q_θ = cos θ·A + sin θ·B` for a Frobenius-orthonormal
/// basis `(A, B)` of the plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CircleReport {
    pub mixed: Status,
    pub degeneracy_free: Status,
    /// Minimum over sampled θ of the eigenvalue closest to zero (absolute).
    pub min_abs_eigenvalue: f64,
    /// Maximum over sampled θ of `λ_min(q_θ)` (negative for mixed planes).
    pub max_lambda_min: f64,
    /// θ attaining `max_lambda_min`.
    pub argmax_theta: f64,
    pub lipschitz: f64,
    pub intervals: usize,
    pub tol: f64,
}

/// Certified sweep of the unit circle of a plane of quadrics (Weyl bound
/// `|λ_k(q_θ) − λ_k(q_φ)| ≤ |θ−φ|·(‖A‖+‖B‖)`).
pub fn circle_sweep(a: &Mat, b: &Mat, tol: f64) -> Result<CircleReport> {
    if a.shape() != b.shape() {
        return Err(Error::Malformed("plane generators differ in shape".into()));
    }
    check_symmetric(a)?;
    check_symmetric(b)?;
    let ob = linalg::sym_span_basis(&[a.clone(), b.clone()], 1e-10);
    if ob.len() < 2 {
        return Err(Error::DegenerateBasis("plane generators are dependent".into()));
    }
    let (e1, e2) = (&ob[0], &ob[1]);
    let lip = linalg::spectral_norm(e1) + linalg::spectral_norm(e2);
    let eig_at = |t: f64| linalg::sym_eigenvalues(&(e1 * t.cos() + e2 * t.sin()));
    let tau = std::f64::consts::TAU;
    let mut stack: Vec<(f64, f64)> = (0..64).map(|i| (tau * i as f64 / 64.0, tau * (i + 1) as f64 / 64.0)).collect();
    let mut mixed_ok = true;
    let mut mixed_fail = false;
    let mut nd_ok = true;
    let mut nd_fail = false;
    let mut min_abs = f64::INFINITY;
    let mut max_lmin = f64::NEG_INFINITY;
    let mut arg = 0.0;
    let mut intervals = 0usize;
    let h_min = 1e-7;
    let cut = tol * lip.max(1e-300);
    while let Some((lo, hi)) = stack.pop() {
        intervals += 1;
        let mid = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let ev = eig_at(mid);
        let lmin = ev[0];
        let closest = ev.iter().fold(f64::INFINITY, |m, &x| m.min(x.abs()));
        min_abs = min_abs.min(closest);
        if lmin > max_lmin {
            max_lmin = lmin;
            arg = mid;
        }
        let mixed_cert = lmin + h * lip < 0.0;
        let nd_cert = closest > h * lip;
        if lmin >= -cut {
            mixed_fail = true;
        }
        if closest <= cut {
            nd_fail = true;
        }
        let need_split = (!mixed_cert && !mixed_fail) || (!nd_cert && !nd_fail);
        if need_split {
            if h < h_min || intervals > 1 << 20 {
                if !mixed_cert {
                    mixed_ok = false;
                }
                if !nd_cert {
                    nd_ok = false;
                }
                continue;
            }
            stack.push((lo, mid));
            stack.push((mid, hi));
        } else {
            if !mixed_cert {
                mixed_ok = false;
            }
            if !nd_cert {
                nd_ok = false;
            }
        }
        if mixed_fail && nd_fail {
            break;
        }
    }
    let mixed = if mixed_fail {
        Status::False
    } else if mixed_ok {
        Status::True
    } else {
        Status::Inconclusive
    };
    let degeneracy_free = if nd_fail {
        Status::False
    } else if nd_ok {
        Status::True
    } else {
        Status::Inconclusive
    };
    Ok(CircleReport {
        mixed,
        degeneracy_free,
        min_abs_eigenvalue: min_abs,
        max_lambda_min: max_lmin,
        argmax_theta: arg,
        lipschitz: lip,
        intervals,
        tol,
    })
}

/// Hilbert distance `log(λ_max/λ_min)` of `p1^{-1} p2` on the positive cone.
pub fn hilbert_distance(p1: &SymTensor, p2: &SymTensor) -> Result<f64> {
    if p1.dim != p2.dim {
        return Err(Error::Malformed("tensors differ in dimension".into()));
    }
    let l1 = p1.mat.clone().cholesky().ok_or_else(|| Error::NotPositiveDefinite(linalg::lambda_min(&p1.mat).0))?;
    if p2.mat.clone().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite(linalg::lambda_min(&p2.mat).0));
    }
    let li = l1.l().try_inverse().ok_or_else(|| Error::NotPositiveDefinite(0.0))?;
    let m = &li * &p2.mat * li.transpose();
    let ev = linalg::sym_eigenvalues(&m);
    Ok((ev[ev.len() - 1] / ev[0]).ln().max(0.0))
}
