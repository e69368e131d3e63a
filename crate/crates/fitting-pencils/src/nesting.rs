//! Cross-ratio distance between nested quadrics and limit subspaces of
//! nested sequences.

use crate::error::{Error, Result};
use crate::linalg::{self, Mat, Vct};
use crate::quadrics::Quadric;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Two quadrics with `q2 − q1` positive definite (after rescaling `q2`).
#[derive(Debug, Clone)]
pub struct NestedPair {
    pub q1: Quadric,
    pub q2: Quadric,
    /// Positive factor applied to the input `q2`.
    pub scale: f64,
    pub margin: f64,
}

impl NestedPair {
    /// Accepts the pair as given when `q2 − q1` is positive definite, otherwise
    /// searches `c ∈ [e^{-5}, e^5]` maximizing `λ_min(c·q2 − q1)` (a concave
    /// function of `c`).
    pub fn new(q1: Quadric, q2: Quadric) -> Result<Self> {
        if q1.dim != q2.dim {
            return Err(Error::Malformed("quadrics live in different dimensions".into()));
        }
        let f = |c: f64| linalg::lambda_min(&(&q2.mat * c - &q1.mat)).0;
        let m1 = f(1.0);
        if m1 > 0.0 {
            return Ok(NestedPair { q1, q2, scale: 1.0, margin: m1 });
        }
        let (mut lo, mut hi) = (-5.0f64, 5.0f64);
        for _ in 0..100 {
            let a = lo + (hi - lo) / 3.0;
            let b = hi - (hi - lo) / 3.0;
            if f(a.exp()) < f(b.exp()) {
                lo = a;
            } else {
                hi = b;
            }
        }
        let c = (0.5 * (lo + hi)).exp();
        let m = f(c);
        if m <= 0.0 {
            return Err(Error::NotPositiveDefinite(m));
        }
        let q2 = q2.scaled(c);
        Ok(NestedPair { q1, q2, scale: c, margin: m })
    }
}

/// Cross ratio of the root quadruple on one projective line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LineCrossRatio {
    Finite(f64),
    Infinite,
    NoCrossing,
}

impl LineCrossRatio {
    pub fn value(self) -> Option<f64> {
        match self {
            LineCrossRatio::Finite(v) => Some(v),
            LineCrossRatio::Infinite => Some(f64::INFINITY),
            LineCrossRatio::NoCrossing => None,
        }
    }
}

/// Real roots of `a x² + 2 b x + c` with `a < 0`, sorted.
fn roots(a: f64, b: f64, c: f64, scale: f64) -> Option<(f64, f64)> {
    let disc = b * b - a * c;
    if disc < -1e-14 * scale * scale {
        return None;
    }
    let s = disc.max(0.0).sqrt();
    // stable form of (−b ± s)/a
    let q = -(b + b.signum() * s);
    let (r1, r2) = if q.abs() > 0.0 { (q / a, c / q) } else { (-b / a, -b / a) };
    Some((r1.min(r2), r1.max(r2)))
}

fn line_cr_frame(q1: &Mat, q2: &Mat, f: &Mat) -> LineCrossRatio {
    let m1 = linalg::symmetrize(&(f.transpose() * q1 * f));
    let m2 = linalg::symmetrize(&(f.transpose() * q2 * f));
    let (ev, vecs) = linalg::sym_eigen(&m2);
    let scale = m1.amax().max(m2.amax()).max(1e-300);
    if ev[1] <= 1e-13 * scale {
        // q2 ≤ 0 on the line, so q1 < 0 there
        return LineCrossRatio::NoCrossing;
    }
    if ev[0] >= -1e-13 * scale {
        return LineCrossRatio::NoCrossing;
    }
    // chart p(x) = e + x c, with c negative for q2 (hence for q1) at infinity
    let e = vecs.column(1).into_owned();
    let c = vecs.column(0).into_owned();
    let x2 = (ev[1] / -ev[0]).sqrt();
    let a1 = c.dot(&(&m1 * &c));
    let b1 = e.dot(&(&m1 * &c));
    let c1 = e.dot(&(&m1 * &e));
    let Some((xp1, x1)) = roots(a1, b1, c1, scale) else {
        return LineCrossRatio::NoCrossing;
    };
    let xp2 = -x2;
    // roots merging at the rounding level of the restricted forms
    if (b1 * b1 - a1 * c1) <= 1e-14 * scale * scale {
        return LineCrossRatio::Infinite;
    }
    let v = (x2 - xp1) / (x2 - xp2) * (x1 - xp2) / (x1 - xp1);
    LineCrossRatio::Finite(v.max(1.0))
}

/// Cross ratio `(x2 − x'1)/(x2 − x'2) · (x1 − x'2)/(x1 − x'1)` of the zeros
/// of `q1` and `q2` on the line through `a` and `b`.
pub fn line_cross_ratio(pair: &NestedPair, a: &Vct, b: &Vct) -> Result<LineCrossRatio> {
    let m = Mat::from_columns(&[a.clone(), b.clone()]);
    if linalg::frame_conditioning(&m) < 1e-10 {
        return Err(Error::RankDeficientFrame(linalg::frame_conditioning(&m)));
    }
    Ok(line_cr_frame(&pair.q1.mat, &pair.q2.mat, &linalg::orthonormalize(&m)))
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossRatioResult {
    pub value: f64,
    /// Two points spanning the minimizing line.
    pub argmin_line: (Vec<f64>, Vec<f64>),
    pub lines_searched: usize,
    /// Value predicted from the generalized eigenvalues of `(q1, q2 − q1)`.
    pub closed_form: f64,
    /// Best value found by random lines and local refinement alone.
    pub search_value: f64,
}

/// The line through the extreme generalized eigenvectors of `(q1, q2 − q1)`,
/// and `(r1 + r2)²/(4 r1 r2)` for `r1 = √(a/b)`, `r2 = √((a+1)/(b−1))`,
/// where `a = μ_max`, `b = −μ_min`.
pub fn closed_form_cross_ratio(pair: &NestedPair) -> Result<(f64, Vct, Vct)> {
    let p = &pair.q2.mat - &pair.q1.mat;
    let l = p.clone().cholesky().ok_or(Error::NotPositiveDefinite(pair.margin))?.l();
    let li = l.try_inverse().ok_or(Error::NotPositiveDefinite(pair.margin))?;
    let (mu, z) = linalg::sym_eigen(&(&li * &pair.q1.mat * li.transpose()));
    let d = mu.len();
    let (a, b) = (mu[d - 1], -mu[0]);
    if a <= 0.0 || b <= 1.0 {
        return Err(Error::Precondition("both quadrics must be indefinite".into()));
    }
    let r1 = (a / b).sqrt();
    let r2 = ((a + 1.0) / (b - 1.0)).sqrt();
    let v = (r1 + r2).powi(2) / (4.0 * r1 * r2);
    let u1 = (li.transpose() * z.column(d - 1)).normalize();
    let u2 = (li.transpose() * z.column(0)).normalize();
    Ok((v, u1, u2))
}

fn sample_where<R: Rng + ?Sized>(rng: &mut R, q: &Mat, sign: f64) -> Option<Vct> {
    for _ in 0..256 {
        let v = linalg::unit_vector(rng, q.nrows());
        if sign * v.dot(&(q * &v)) > 0.0 {
            return Some(v);
        }
    }
    None
}

fn eval_line(pair: &NestedPair, a: &Vct, b: &Vct) -> f64 {
    let m = Mat::from_columns(&[a.clone(), b.clone()]);
    if linalg::frame_conditioning(&m) < 1e-8 {
        return f64::INFINITY;
    }
    match line_cr_frame(&pair.q1.mat, &pair.q2.mat, &linalg::orthonormalize(&m)) {
        LineCrossRatio::Finite(v) => v,
        _ => f64::INFINITY,
    }
}

/// Pattern search on the pair of spanning points.
fn refine_line<R: Rng + ?Sized>(pair: &NestedPair, a: &Vct, b: &Vct, rng: &mut R, iters: usize) -> (f64, Vct, Vct) {
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut f = eval_line(pair, &a, &b);
    let mut step = 0.2;
    let d = a.len();
    for _ in 0..iters {
        let da = linalg::gaussian_vector(rng, d) * step;
        let db = linalg::gaussian_vector(rng, d) * step;
        let (ta, tb) = ((&a + &da).normalize(), (&b + &db).normalize());
        let ft = eval_line(pair, &ta, &tb);
        if ft < f {
            a = ta;
            b = tb;
            f = ft;
            step *= 1.2;
        } else {
            step *= 0.93;
            if step < 1e-9 {
                break;
            }
        }
    }
    (f, a, b)
}

/// Minimum over projective lines of the root cross ratio. The closed-form
/// line seeds the search; `budget` random crossing lines (through a point
/// where `q2 > 0` and one where `q1 < 0`) are refined locally.
pub fn cross_ratio_distance(pair: &NestedPair, budget: usize, seed: u64) -> Result<CrossRatioResult> {
    let (closed, u1, u2) = closed_form_cross_ratio(pair)?;
    let seeded = eval_line(pair, &u1, &u2);
    let mut cands: Vec<(f64, usize, Vct, Vct)> = (0..budget)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = linalg::rng(linalg::substream(seed, i as u64));
            let a = sample_where(&mut rng, &pair.q2.mat, 1.0)?;
            let b = sample_where(&mut rng, &pair.q1.mat, -1.0)?;
            let f = eval_line(pair, &a, &b);
            f.is_finite().then_some((f, i, a, b))
        })
        .collect();
    if cands.is_empty() && !seeded.is_finite() {
        return Err(Error::Exhausted("no crossing line found".into()));
    }
    cands.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let top = cands.len().min(4);
    let refined: Vec<(f64, Vct, Vct)> = cands[..top]
        .par_iter()
        .map(|(_, i, a, b)| {
            let mut rng = linalg::rng(linalg::substream(seed ^ 0xa5a5, *i as u64));
            refine_line(pair, a, b, &mut rng, 400)
        })
        .collect();
    let mut search = (f64::INFINITY, Vct::zeros(0), Vct::zeros(0));
    for r in refined {
        if r.0 < search.0 {
            search = r;
        }
    }
    let (value, a, b) = if seeded <= search.0 { (seeded, u1, u2) } else { search.clone() };
    Ok(CrossRatioResult {
        value,
        argmin_line: (a.iter().copied().collect(), b.iter().copied().collect()),
        lines_searched: cands.len() + 1,
        closed_form: closed,
        search_value: search.0,
    })
}

/// Estimated limit of `∩_k {q_k ≤ 0}`.
#[derive(Debug, Clone, Serialize)]
pub struct LimitSubspace {
    #[serde(with = "crate::io::mat_rows")]
    pub frame: Mat,
    pub dim: usize,
    /// Largest angle between a survivor and the frame.
    pub residual: f64,
    pub survivors: usize,
    pub singular_values: Vec<f64>,
    pub converged: bool,
}

/// Residuals above this mean the survivors do not cluster on a subspace.
pub const LIMIT_CONVERGENCE: f64 = 1e-2;

/// Samples unit vectors (uniformly, and near the non-positive eigenspace of
/// the last quadric at log-uniform scales), keeps those with `q̂_k(v) ≤ tol`
/// for every spectrally normalized `q̂_k`, and reads the subspace off the
/// singular values of the survivors: dimension is the number of singular
/// values above `1e-6 σ_1`, capped at the position of the largest ratio gap.
pub fn limit_subspace(seq: &[Quadric], tol: f64, samples: usize, seed: u64) -> Result<LimitSubspace> {
    let last = seq.last().ok_or_else(|| Error::Malformed("empty quadric sequence".into()))?;
    let d = last.dim;
    let normed: Vec<Mat> = seq.iter().map(|q| &q.mat / linalg::spectral_norm(&q.mat).max(1e-300)).collect();
    // the limit sits where the last quadric is negative but small, which
    // rounding can flip; count negative directions on the first quadric
    let k = linalg::sym_eigenvalues(&normed[0]).iter().filter(|&&x| x <= 0.0).count();
    let (ev, vecs) = linalg::sym_eigen(&normed[normed.len() - 1]);
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| ev[a].total_cmp(&ev[b]));
    let neg: Vec<usize> = idx[..k].to_vec();
    let survive = |v: &Vct| normed.iter().all(|q| v.dot(&(q * v)) <= tol);
    let mut rng = linalg::rng(seed);
    let mut surv: Vec<Vct> = Vec::new();
    for i in 0..samples {
        let v = if i % 4 == 0 || neg.is_empty() {
            linalg::unit_vector(&mut rng, d)
        } else {
            let mut v = Vct::zeros(d);
            for &j in &neg {
                v += vecs.column(j) * linalg::gaussian(&mut rng);
            }
            let s = 10f64.powf(rng.random_range(-9.0..0.0));
            (v.normalize() + linalg::unit_vector(&mut rng, d) * s).normalize()
        };
        if survive(&v) {
            surv.push(v);
        }
    }
    if surv.is_empty() {
        return Err(Error::Exhausted("no sample survived; tolerance too tight".into()));
    }
    let m = Mat::from_columns(&surv);
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sv: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut r = sv.iter().filter(|&&s| s > 1e-6 * sv[0]).count().max(1);
    if r > 1 {
        let (mut best, mut at) = (0.0, r);
        for k in 0..r.min(sv.len()) {
            let next = sv.get(k + 1).copied().unwrap_or(0.0);
            let g = sv[k] / next.max(1e-300 * sv[0]);
            if k + 1 < sv.len() && g > best {
                best = g;
                at = k + 1;
            }
        }
        r = r.min(at);
    }
    let frame = Mat::from_columns(&order[..r].iter().map(|&i| u.column(i).into_owned()).collect::<Vec<_>>());
    let residual = surv
        .iter()
        .map(|v| {
            let p = frame.transpose() * v;
            p.norm().min(1.0).acos()
        })
        .fold(0.0, f64::max);
    Ok(LimitSubspace { frame, dim: r, residual, survivors: surv.len(), singular_values: sv, converged: residual < LIMIT_CONVERGENCE })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: &[f64]) -> Quadric {
        Quadric::new(Mat::from_diagonal(&Vct::from_row_slice(v))).unwrap()
    }

    #[test]
    fn planar_example_is_nine_eighths() {
        let p = NestedPair::new(q(&[1.0, -1.0]), q(&[2.0, -0.5])).unwrap();
        let a = Vct::from_row_slice(&[1.0, 0.0]);
        let b = Vct::from_row_slice(&[0.0, 1.0]);
        let v = line_cross_ratio(&p, &a, &b).unwrap().value().unwrap();
        assert!((v - 1.125).abs() < 1e-14);
        let r = cross_ratio_distance(&p, 100, 1).unwrap();
        assert!((r.value - 1.125).abs() < 1e-12);
        assert!((r.closed_form - 1.125).abs() < 1e-12);
    }

    #[test]
    fn line_inside_positive_region_does_not_cross() {
        let p = NestedPair::new(q(&[1.0, 1.0, -1.0, -1.0]), q(&[2.0, 2.0, -0.5, -0.5])).unwrap();
        let a = Vct::from_row_slice(&[1.0, 0.0, 0.0, 0.0]);
        let b = Vct::from_row_slice(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(line_cross_ratio(&p, &a, &b).unwrap(), LineCrossRatio::NoCrossing);
        assert!(line_cross_ratio(&p, &a, &a).is_err());
    }

    #[test]
    fn tangent_line_is_infinite() {
        // the line {(1, t, 1, 0)} touches the cone of q1 at t = 0
        let p = NestedPair::new(q(&[-1.0, -1.0, 1.0, 1.0]), q(&[-0.5, -0.5, 1.5, 1.5])).unwrap();
        let a = Vct::from_row_slice(&[1.0, 0.0, 1.0, 0.0]);
        let b = Vct::from_row_slice(&[0.0, 1.0, 0.0, 0.0]);
        assert_eq!(line_cross_ratio(&p, &a, &b).unwrap(), LineCrossRatio::Infinite);
    }

    #[test]
    fn rescaling_renests() {
        let p = NestedPair::new(q(&[1.0, -1.0]), q(&[1.0, -1.0])).unwrap_err();
        assert!(matches!(p, Error::NotPositiveDefinite(_)));
        let p = NestedPair::new(q(&[1.0, -1.0]), q(&[3.0, -0.25])).unwrap();
        assert!(p.margin > 0.0);
    }

    #[test]
    fn diagonal_flow_collapses_to_attracting_line() {
        let seq: Vec<Quadric> = (0..12).map(|t| q(&[-(-(t as f64)).exp(), (t as f64).exp()])).collect();
        let l = limit_subspace(&seq, 1e-12, 4000, 3).unwrap();
        assert_eq!(l.dim, 1);
        assert!(l.frame[(1, 0)].abs() < 1e-3);
        let c = limit_subspace(&[q(&[1.0, 1.0, -1.0, -1.0])], 0.0, 4000, 3).unwrap();
        assert!(!c.converged);
    }
}
