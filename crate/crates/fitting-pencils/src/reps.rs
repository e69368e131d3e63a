//! Fuchsian representations (Schottky groups, the regular-octagon genus-two
//! group), their embeddings into `Sp(2n, R)`, boundary Lagrangians and the
//! singular-value gap audit.

use crate::error::{Error, Result};
use crate::hyperbolic::{self, BoundaryPoint, C64};
use crate::linalg::{self, Mat};
use crate::symplectic::{Lagrangian, SymplecticSpace};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepKind {
    Schottky,
    Genus2Octagon,
}

/// Generators in `SL(2, R)`; words use letters `2i` for generator `i` and
/// `2i + 1` for its inverse.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FuchsianRep {
    pub kind: RepKind,
    #[serde(with = "mats_rows")]
    pub generators: Vec<Mat>,
    /// `‖Π[a_i, b_i] − I‖_max` for the genus-two group.
    pub relator_residual: Option<f64>,
}

mod mats_rows {
    use crate::io;
    use crate::linalg::Mat;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &[Mat], s: S) -> Result<S::Ok, S::Error> {
        m.iter().map(io::rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Mat>, D::Error> {
        let r: Vec<Vec<Vec<f64>>> = Vec::deserialize(d)?;
        r.iter().map(|x| io::from_rows(x).map_err(serde::de::Error::custom)).collect()
    }
}

pub fn inverse2(g: &Mat) -> Mat {
    let det = g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)];
    Mat::from_row_slice(2, 2, &[g[(1, 1)] / det, -g[(0, 1)] / det, -g[(1, 0)] / det, g[(0, 0)] / det])
}

impl FuchsianRep {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// Matrix of a letter.
    pub fn letter(&self, l: usize) -> Mat {
        let g = &self.generators[l / 2];
        if l % 2 == 0 {
            g.clone()
        } else {
            inverse2(g)
        }
    }

    pub fn letters(&self) -> Vec<Mat> {
        (0..2 * self.rank()).map(|l| self.letter(l)).collect()
    }

    pub fn word(&self, w: &[usize]) -> Mat {
        let mut m = Mat::identity(2, 2);
        for &l in w {
            m *= self.letter(l);
        }
        m
    }

    /// All reduced words of length `1..=maxlen`.
    pub fn reduced_words(&self, maxlen: usize) -> Vec<Vec<usize>> {
        let k = 2 * self.rank();
        let mut out = Vec::new();
        let mut frontier: Vec<Vec<usize>> = (0..k).map(|l| vec![l]).collect();
        for _ in 0..maxlen {
            out.extend(frontier.iter().cloned());
            let mut next = Vec::new();
            for w in &frontier {
                let last = *w.last().unwrap();
                for l in 0..k {
                    if l != (last ^ 1) {
                        let mut v = w.clone();
                        v.push(l);
                        next.push(v);
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

/// Half-width, seen from `i`, of the ping-pong arc of a translation of length `t`
/// whose axis passes through `i`: `cos α = tanh(t/2)`.
pub fn pingpong_half_width(t: f64) -> f64 {
    (t / 2.0).tanh().acos()
}

/// Two hyperbolic generators with axes through `i` at angle `separation`:
/// `a = diag(e^{t_1/2}, e^{-t_1/2})` and `b` its conjugate (with length `t_2`)
/// by the rotation of `H²` about `i` by `separation`.
pub fn build_schottky(t1: f64, t2: f64, separation: f64) -> Result<FuchsianRep> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::NotSchottky("translation lengths must be positive".into()));
    }
    if !(separation > 0.0 && separation <= PI / 2.0) {
        return Err(Error::NotSchottky(format!("separation {separation} outside (0, π/2]")));
    }
    let w = pingpong_half_width(t1) + pingpong_half_width(t2);
    if w >= separation {
        return Err(Error::NotSchottky(format!(
            "ping-pong arcs overlap: half-widths sum to {w:.4} ≥ separation {separation:.4}"
        )));
    }
    let a = hyperbolic::geodesic_matrix(t1);
    let k = hyperbolic::rotation(separation / 2.0);
    let b = &k * hyperbolic::geodesic_matrix(t2) * inverse2(&k);
    Ok(FuchsianRep { kind: RepKind::Schottky, generators: vec![a, b], relator_residual: None })
}

/// The default Schottky group: lengths 2, perpendicular axes.
pub fn default_schottky() -> FuchsianRep {
    build_schottky(2.0, 2.0, PI / 2.0).expect("default parameters are Schottky")
}

fn su11_to_sl2(m: &[[C64; 2]; 2]) -> Mat {
    // the Cayley map z ↦ (z - i)/(z + i) conjugates SU(1,1) to SL(2,R)
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let c = [[one, -i], [one, i]];
    let ci = [[one * 0.5, one * 0.5], [i * 0.5, -i * 0.5]];
    let mul = |a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]| {
        let mut r = [[C64::new(0.0, 0.0); 2]; 2];
        for (p, row) in r.iter_mut().enumerate() {
            for (q, x) in row.iter_mut().enumerate() {
                *x = a[p][0] * b[0][q] + a[p][1] * b[1][q];
            }
        }
        r
    };
    let r = mul(&mul(&ci, m), &c);
    Mat::from_row_slice(2, 2, &[r[0][0].re, r[0][1].re, r[1][0].re, r[1][1].re])
}

/// Side pairings of the regular hyperbolic octagon with angles `π/4`, glued by
/// the pattern `a_1 b_1 a_1⁻¹ b_1⁻¹ a_2 b_2 a_2⁻¹ b_2⁻¹`. Returns `[a_1, b_1, a_2, b_2]`.
pub fn build_genus2() -> FuchsianRep {
    // distance from the center to a side midpoint: cosh d = cot(π/8)
    let ch = 1.0 / (PI / 8.0).tan();
    let sh = (ch * ch - 1.0).sqrt();
    let rot = |phi: f64| {
        let e = C64::from_polar(1.0, phi / 2.0);
        [[e, C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), e.conj()]]
    };
    let trans = [[C64::new(ch, 0.0), C64::new(sh, 0.0)], [C64::new(sh, 0.0), C64::new(ch, 0.0)]];
    let mul = |a: &[[C64; 2]; 2], b: &[[C64; 2]; 2]| {
        let mut r = [[C64::new(0.0, 0.0); 2]; 2];
        for (p, row) in r.iter_mut().enumerate() {
            for (q, x) in row.iter_mut().enumerate() {
                *x = a[p][0] * b[0][q] + a[p][1] * b[1][q];
            }
        }
        r
    };
    // pairing sending side i onto side j, octagon interior to exterior
    let pairing = |i: usize, j: usize| {
        let ti = PI * i as f64 / 4.0;
        let tj = PI * j as f64 / 4.0;
        su11_to_sl2(&mul(&mul(&rot(tj), &trans), &rot(PI - ti)))
    };
    let gens = vec![pairing(2, 0), pairing(1, 3), pairing(6, 4), pairing(5, 7)];
    let rep = FuchsianRep { kind: RepKind::Genus2Octagon, generators: gens, relator_residual: None };
    let residual = genus2_relator_residual(&rep);
    FuchsianRep { relator_residual: Some(residual), ..rep }
}

/// `‖[a_1, b_1][a_2, b_2] − I‖_max`.
pub fn genus2_relator_residual(rep: &FuchsianRep) -> f64 {
    let w = [0, 2, 1, 3, 4, 6, 5, 7];
    (rep.word(&w) - Mat::identity(2, 2)).amax()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingKind {
    Irreducible,
    Diagonal,
}

/// A representation `ι : SL(2,R) → Sp(2n,R)` for the standard form.
///
/// Irreducible: `Sym^{2n-1}R²` in the orthonormal basis
/// `f_k = √C(m,k) X^{m-k}Y^k`, Darboux basis `x_{k+1} = f_k`,
/// `y_{k+1} = (-1)^k f_{m-k}`. Diagonal: `n` copies of `R²` on the planes
/// `(x_i, y_i)`. Both are conjugated by `diag(I, -I)` when needed so that
/// positively ordered boundary triples map to maximal triples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Embedding {
    pub n: usize,
    pub kind: EmbeddingKind,
    pub flipped: bool,
}

fn binomial(m: usize, k: usize) -> f64 {
    let mut r = 1.0;
    for i in 0..k {
        r = r * (m - i) as f64 / (i + 1) as f64;
    }
    r
}

/// Coefficients of `(αX + βY)^p (γX + δY)^q` in the monomials `X^{p+q-j} Y^j`.
fn product_coeffs(alpha: f64, beta: f64, p: usize, gamma: f64, delta: f64, q: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    let mut mul = |a: f64, b: f64| {
        let mut n = vec![0.0; c.len() + 1];
        for (j, &x) in c.iter().enumerate() {
            n[j] += a * x;
            n[j + 1] += b * x;
        }
        c = n;
    };
    for _ in 0..p {
        mul(alpha, beta);
    }
    for _ in 0..q {
        mul(gamma, delta);
    }
    c
}

impl Embedding {
    pub fn new(n: usize, kind: EmbeddingKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("half-dimension must be positive".into()));
        }
        let mut e = Embedding { n, kind, flipped: false };
        let sp = e.space();
        let pts = [[0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        let l: Vec<Lagrangian> = pts.iter().map(|p| e.boundary_lagrangian(p).expect("nonzero point")).collect();
        let m = crate::symplectic::maslov_index(&sp, &l[0], &l[1], &l[2])?;
        if m == -(n as i64) {
            e.flipped = true;
        } else if m != n as i64 {
            return Err(Error::Precondition(format!("boundary triple has Maslov index {m}")));
        }
        Ok(e)
    }

    pub fn irreducible(n: usize) -> Self {
        Embedding::new(n, EmbeddingKind::Irreducible).expect("irreducible embedding")
    }

    pub fn diagonal(n: usize) -> Self {
        Embedding::new(n, EmbeddingKind::Diagonal).expect("diagonal embedding")
    }

    pub fn space(&self) -> SymplecticSpace {
        SymplecticSpace::standard(self.n)
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Index in `R^{2n}` of the symmetric-power basis vector `f_k`, with sign.
    fn darboux_slot(&self, k: usize) -> (usize, f64) {
        let n = self.n;
        if k < n {
            (k, 1.0)
        } else {
            let j = 2 * n - 1 - k;
            (n + j, if j % 2 == 0 { 1.0 } else { -1.0 })
        }
    }

    fn flip(&self, m: Mat) -> Mat {
        if !self.flipped {
            return m;
        }
        let n = self.n;
        let mut t = Mat::identity(2 * n, 2 * n);
        for i in n..2 * n {
            t[(i, i)] = -1.0;
        }
        &t * m * &t
    }

    /// `ι(g)`.
    pub fn apply(&self, g: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(2 * n, 2 * n);
        match self.kind {
            EmbeddingKind::Diagonal => {
                for i in 0..n {
                    out[(i, i)] = g[(0, 0)];
                    out[(i, n + i)] = g[(0, 1)];
                    out[(n + i, i)] = g[(1, 0)];
                    out[(n + i, n + i)] = g[(1, 1)];
                }
            }
            EmbeddingKind::Irreducible => {
                let m = 2 * n - 1;
                for k in 0..=m {
                    // g·(X^{m-k}Y^k) = (g11 X + g21 Y)^{m-k} (g12 X + g22 Y)^k
                    let c = product_coeffs(g[(0, 0)], g[(1, 0)], m - k, g[(0, 1)], g[(1, 1)], k);
                    let (col, sc) = self.darboux_slot(k);
                    for (j, &cj) in c.iter().enumerate() {
                        let (row, sr) = self.darboux_slot(j);
                        out[(row, col)] = sr * sc * cj * (binomial(m, k) / binomial(m, j)).sqrt();
                    }
                }
            }
        }
        self.flip(out)
    }

    /// `dι(X)` for `X ∈ sl(2,R)`.
    pub fn derivative(&self, x: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(2 * n, 2 * n);
        match self.kind {
            EmbeddingKind::Diagonal => {
                for i in 0..n {
                    out[(i, i)] = x[(0, 0)];
                    out[(i, n + i)] = x[(0, 1)];
                    out[(n + i, i)] = x[(1, 0)];
                    out[(n + i, n + i)] = x[(1, 1)];
                }
            }
            EmbeddingKind::Irreducible => {
                let m = 2 * n - 1;
                let (a, b, c, d) = (x[(0, 0)], x[(0, 1)], x[(1, 0)], x[(1, 1)]);
                for k in 0..=m {
                    // derivation X ↦ aX + cY, Y ↦ bX + dY on X^{m-k} Y^k
                    let mut coeff = vec![0.0; m + 1];
                    let p = (m - k) as f64;
                    let q = k as f64;
                    coeff[k] += p * a + q * d;
                    if k + 1 <= m {
                        coeff[k + 1] += p * c;
                    }
                    if k >= 1 {
                        coeff[k - 1] += q * b;
                    }
                    let (col, sc) = self.darboux_slot(k);
                    for (j, &cj) in coeff.iter().enumerate() {
                        if cj != 0.0 {
                            let (row, sr) = self.darboux_slot(j);
                            out[(row, col)] = sr * sc * cj * (binomial(m, k) / binomial(m, j)).sqrt();
                        }
                    }
                }
            }
        }
        self.flip(out)
    }

    /// The Lagrangian attached to `[x : y] ∈ ∂H²`: the osculating `n`-plane
    /// of the Veronese curve (irreducible) or the sum of copies of the line
    /// (diagonal).
    pub fn boundary_lagrangian(&self, p: &BoundaryPoint) -> Result<Lagrangian> {
        let nn = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if !(nn > 0.0) || !nn.is_finite() {
            return Err(Error::Malformed("boundary point must be a nonzero finite vector".into()));
        }
        let (u1, u2) = (p[0] / nn, p[1] / nn);
        let n = self.n;
        let mut f = Mat::zeros(2 * n, n);
        match self.kind {
            EmbeddingKind::Diagonal => {
                for i in 0..n {
                    f[(i, i)] = u1;
                    f[(n + i, i)] = u2;
                }
            }
            EmbeddingKind::Irreducible => {
                let m = 2 * n - 1;
                // (u·v)^{m-j} (w·v)^j with w = u rotated by π/2
                let (w1, w2) = (-u2, u1);
                for j in 0..n {
                    let c = product_coeffs(u1, u2, m - j, w1, w2, j);
                    for (k, &ck) in c.iter().enumerate() {
                        let (row, s) = self.darboux_slot(k);
                        f[(row, j)] = s * ck / binomial(m, k).sqrt();
                    }
                }
            }
        }
        if self.flipped {
            for i in n..2 * n {
                for j in 0..n {
                    f[(i, j)] = -f[(i, j)];
                }
            }
        }
        Ok(Lagrangian { frame: linalg::orthonormalize(&f) })
    }
}

/// Per-word gap data and the fitted bound `log(σ_n/σ_{n+1}) ≥ A·|γ| + B`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapReport {
    pub n: usize,
    pub maxlen: usize,
    /// `(word length, log σ_n/σ_{n+1})` for every reduced nontrivial word.
    pub words: Vec<(usize, f64)>,
    /// Minimum log-gap per length `1..=maxlen`.
    pub min_by_length: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// Least-squares slope and intercept over all words.
    pub ls_slope: f64,
    pub ls_intercept: f64,
    /// Least-squares slope of `log gap(g_i^k)` against `k`, per generator.
    pub power_slopes: Vec<f64>,
    /// `min over words of log-gap − (A·|γ| + B)`; nonnegative by construction.
    pub bound_slack: f64,
}

/// `k`-th compound matrix `Λ^k M` in the lexicographic basis of `k`-subsets.
pub fn compound(m: &Mat, k: usize) -> Mat {
    let d = m.nrows();
    let subsets = k_subsets(d, k);
    let s = subsets.len();
    let mut out = Mat::zeros(s, s);
    for (i, r) in subsets.iter().enumerate() {
        for (j, c) in subsets.iter().enumerate() {
            out[(i, j)] = if k == 0 { 1.0 } else { Mat::from_fn(k, k, |a, b| m[(r[a], c[b])]).determinant() };
        }
    }
    out
}

fn k_subsets(d: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, d: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..d {
            cur.push(i);
            rec(i + 1, d, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, d, k, &mut Vec::new(), &mut out);
    out
}

fn log_top_singular(m: &Mat) -> f64 {
    if m.nrows() == 1 {
        return m[(0, 0)].abs().ln();
    }
    linalg::singular_values(m)[0].ln()
}

/// A product of compounds with an accumulated log-scale.
#[derive(Clone)]
struct Scaled {
    mats: Vec<Mat>,
    logs: Vec<f64>,
}

impl Scaled {
    fn times(&self, f: &[Mat]) -> Scaled {
        let mut mats = Vec::with_capacity(f.len());
        let mut logs = self.logs.clone();
        for (i, (m, g)) in self.mats.iter().zip(f).enumerate() {
            let mut p = m * g;
            let s = p.amax();
            if s > 1e100 || (s < 1e-100 && s > 0.0) {
                p /= s;
                logs[i] += s.ln();
            }
            mats.push(p);
        }
        Scaled { mats, logs }
    }

    fn log_gap(&self) -> f64 {
        let l: Vec<f64> = self.mats.iter().zip(&self.logs).map(|(m, s)| log_top_singular(m) + s).collect();
        2.0 * l[1] - l[0] - l[2]
    }
}

/// Log of the middle singular-value gap of `M` via compounds.
pub fn log_middle_gap(m: &Mat, n: usize) -> f64 {
    let s = Scaled { mats: vec![compound(m, n - 1), compound(m, n), compound(m, n + 1)], logs: vec![0.0; 3] };
    s.log_gap()
}

/// Enumerate reduced words up to `maxlen`, compute `log σ_n/σ_{n+1}` of their
/// images in `Sp(2n, R)` through products of compound matrices, and fit the
/// bound through the last length's minimum.
pub fn anosov_gap_audit(rep: &FuchsianRep, emb: &Embedding, maxlen: usize) -> Result<GapReport> {
    if maxlen == 0 || maxlen > 14 {
        return Err(Error::Precondition(format!("maxlen {maxlen} outside 1..=14")));
    }
    let n = emb.n;
    let letters: Vec<Vec<Mat>> = rep
        .letters()
        .iter()
        .map(|g| {
            let big = emb.apply(g);
            vec![compound(&big, n - 1), compound(&big, n), compound(&big, n + 1)]
        })
        .collect();
    let k = letters.len();
    fn dfs(node: &Scaled, last: usize, len: usize, maxlen: usize, letters: &[Vec<Mat>], out: &mut Vec<(usize, f64)>) {
        out.push((len, node.log_gap()));
        if len == maxlen {
            return;
        }
        for (l, f) in letters.iter().enumerate() {
            if l != (last ^ 1) {
                dfs(&node.times(f), l, len + 1, maxlen, letters, out);
            }
        }
    }
    let mut prefixes: Vec<(Scaled, usize)> = Vec::new();
    for l in 0..k {
        prefixes.push((Scaled { mats: letters[l].clone(), logs: vec![0.0; 3] }, l));
    }
    let words: Vec<(usize, f64)> = prefixes
        .par_iter()
        .map(|(s, l)| {
            let mut out = Vec::new();
            dfs(s, *l, 1, maxlen, &letters, &mut out);
            out
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let mut min_by_length = vec![f64::INFINITY; maxlen];
    for &(l, g) in &words {
        min_by_length[l - 1] = min_by_length[l - 1].min(g);
    }
    let (slope, _) = if maxlen == 1 {
        (min_by_length[0], 0.0)
    } else {
        let last = maxlen as f64;
        let ml = min_by_length[maxlen - 1];
        let a = (0..maxlen - 1)
            .map(|i| (ml - min_by_length[i]) / (last - (i + 1) as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        (a, ml - a * last)
    };
    let xs: Vec<f64> = words.iter().map(|w| w.0 as f64).collect();
    let ys: Vec<f64> = words.iter().map(|w| w.1).collect();
    let (ls_intercept, ls_slope) = linalg::least_squares_line(&xs, &ys);
    // B is the minimum of the same expression the bound is checked with, so
    // the per-word inequality holds in floating point, not only up to rounding
    let reduced = |&(l, g): &(usize, f64)| g - slope * l as f64;
    let intercept = words.iter().map(reduced).fold(f64::INFINITY, f64::min);
    let bound_slack = words.iter().map(|w| reduced(w) - intercept).fold(f64::INFINITY, f64::min);
    let power_slopes = (0..rep.rank())
        .map(|i| {
            let g = emb.apply(&rep.generators[i]);
            let mut p = Mat::identity(2 * n, 2 * n);
            let mut ks = Vec::new();
            let mut gs = Vec::new();
            for kpow in 1..=maxlen {
                p = &p * &g;
                ks.push(kpow as f64);
                gs.push(log_middle_gap(&p, n));
            }
            linalg::least_squares_line(&ks, &gs).1
        })
        .collect();
    Ok(GapReport { n, maxlen, words, min_by_length, slope, intercept, ls_slope, ls_intercept, power_slopes, bound_slack })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embeddings_are_symplectic_homomorphisms() {
        let mut r = linalg::rng(11);
        for n in 1..=3 {
            for kind in [EmbeddingKind::Irreducible, EmbeddingKind::Diagonal] {
                let e = Embedding::new(n, kind).unwrap();
                let sp = e.space();
                let g = linalg::random_sl(&mut r, 2, 0.7);
                let h = linalg::random_sl(&mut r, 2, 0.7);
                let (ig, ih) = (e.apply(&g), e.apply(&h));
                assert!(sp.symplectic_residual(&ig) < 1e-10);
                assert!((e.apply(&(&g * &h)) - &ig * &ih).amax() < 1e-10);
                assert!((e.apply(&g.transpose()) - ig.transpose()).amax() < 1e-10);
            }
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let x = Mat::from_row_slice(2, 2, &[0.3, -0.4, 0.9, -0.3]);
        for n in 1..=3 {
            let e = Embedding::irreducible(n);
            let h = 1e-5;
            let fd = (e.apply(&linalg::expm(&(&x * h))) - e.apply(&linalg::expm(&(&x * -h)))) / (2.0 * h);
            assert!((fd - e.derivative(&x)).amax() < 1e-8);
        }
    }

    #[test]
    fn schottky_parameters() {
        assert!(build_schottky(2.0, 2.0, PI / 2.0).is_ok());
        assert!(matches!(build_schottky(2.0, 2.0, 0.0), Err(Error::NotSchottky(_))));
        assert!(matches!(build_schottky(0.5, 0.5, PI / 2.0), Err(Error::NotSchottky(_))));
    }

    #[test]
    fn octagon_relator_closes() {
        let g = build_genus2();
        assert!(g.relator_residual.unwrap() < 1e-9, "{:?}", g.relator_residual);
        for m in &g.generators {
            assert!((m.determinant() - 1.0).abs() < 1e-10);
            assert!(m.trace().abs() > 2.0);
        }
    }

    #[test]
    fn compound_is_multiplicative() {
        let mut r = linalg::rng(2);
        let a = linalg::gaussian_matrix(&mut r, 4, 4);
        let b = linalg::gaussian_matrix(&mut r, 4, 4);
        assert!((compound(&(&a * &b), 2) - compound(&a, 2) * compound(&b, 2)).amax() < 1e-10);
    }
}
