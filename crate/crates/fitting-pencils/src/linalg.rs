//! Dense helpers over `nalgebra::DMatrix<f64>`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Mat = DMatrix<f64>;
pub type Vct = DVector<f64>;

/// Seeded generator used by every randomized routine.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` derived from a master seed (splitmix64 mix).
pub fn substream(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> Mat {
    Mat::from_fn(r, c, |_, _| gaussian(rng))
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vct {
    Vct::from_fn(n, |_, _| gaussian(rng))
}

/// Uniform point on the unit sphere of `R^n`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vct {
    loop {
        let v = gaussian_vector(rng, n);
        let nv = v.norm();
        if nv > 1e-12 {
            return v / nv;
        }
    }
}

/// Random symmetric matrix with Gaussian entries (GOE scaling).
pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Mat {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.transpose()) * 0.5
}

/// Random element of SL(n,R) close to the identity scale: exp of a
/// traceless Gaussian matrix of size `spread`.
pub fn random_sl<R: Rng + ?Sized>(rng: &mut R, n: usize, spread: f64) -> Mat {
    let mut x = gaussian_matrix(rng, n, n) * spread;
    let tr = x.trace() / n as f64;
    for i in 0..n {
        x[(i, i)] -= tr;
    }
    expm(&x)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
pub fn expm(a: &Mat) -> Mat {
    let n = a.nrows();
    let norm = a.norm();
    let mut s = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        s += 1;
    }
    let x = a * scale;
    let mut term = Mat::identity(n, n);
    let mut sum = Mat::identity(n, n);
    for k in 1..=18 {
        term = &term * &x / k as f64;
        sum += &term;
        if term.norm() < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
pub fn sym_eigen(m: &Mat) -> (Vct, Mat) {
    let se = SymmetricEigen::new(symmetrize(m));
    let n = se.eigenvalues.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let vals = Vct::from_iterator(n, idx.iter().map(|&i| se.eigenvalues[i]));
    let mut vecs = Mat::zeros(n, n);
    for (j, &i) in idx.iter().enumerate() {
        vecs.set_column(j, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn sym_eigenvalues(m: &Mat) -> Vct {
    let mut v: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Vct::from_vec(v)
}

/// Smallest eigenvalue and a unit eigenvector.
pub fn lambda_min(m: &Mat) -> (f64, Vct) {
    let (vals, vecs) = sym_eigen(m);
    (vals[0], vecs.column(0).into_owned())
}

/// Spectral norm; symmetric input assumed when `sym` is set.
pub fn spectral_norm(m: &Mat) -> f64 {
    if m.nrows() == m.ncols() && (m - m.transpose()).amax() <= 1e-14 * m.amax().max(1e-300) {
        sym_eigenvalues(m).iter().fold(0.0f64, |a, &b| a.max(b.abs()))
    } else {
        m.clone().svd(false, false).singular_values.max()
    }
}

pub fn singular_values(m: &Mat) -> Vct {
    let mut v: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Vct::from_vec(v)
}

/// Ratio σ_min/σ_max of a frame (0 for empty or zero frames).
pub fn frame_conditioning(m: &Mat) -> f64 {
    let s = singular_values(m);
    if s.is_empty() || s[0] == 0.0 {
        return 0.0;
    }
    s[s.len() - 1] / s[0]
}

/// Orthonormal basis of the column span (thin QR of a full-rank frame).
pub fn orthonormalize(m: &Mat) -> Mat {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let k = m.ncols().min(m.nrows());
    u.columns(0, k).into_owned()
}

/// Orthonormal basis of the span keeping singular values above `rel_tol·σ_1`.
pub fn range_basis(m: &Mat, rel_tol: f64) -> Mat {
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let s = &svd.singular_values;
    let smax = s.max();
    let cols: Vec<usize> = (0..s.len()).filter(|&i| s[i] > rel_tol * smax && smax > 0.0).collect();
    let mut out = Mat::zeros(m.nrows(), cols.len());
    for (j, &i) in cols.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

/// Orthonormal basis of the kernel of `m` (columns), relative tolerance `rel_tol`.
pub fn null_space(m: &Mat, rel_tol: f64) -> Mat {
    let c = m.ncols();
    if m.nrows() == 0 {
        return Mat::identity(c, c);
    }
    // pad to square so the SVD returns a full right basis
    let r = m.nrows().max(c);
    let mut sq = Mat::zeros(r, c);
    sq.view_mut((0, 0), (m.nrows(), c)).copy_from(m);
    let svd = sq.svd(false, true);
    let vt = svd.v_t.expect("right singular vectors");
    let s = &svd.singular_values;
    let top = s.max().max(1e-300);
    let cols: Vec<usize> = (0..s.len()).filter(|&i| s[i] <= rel_tol * top).collect();
    let mut out = Mat::zeros(c, cols.len());
    for (j, &i) in cols.iter().enumerate() {
        out.set_column(j, &vt.row(i).transpose());
    }
    out
}

/// Principal angles (ascending, radians) between the column spans of `a` and `b`.
pub fn principal_angles(a: &Mat, b: &Mat) -> Vec<f64> {
    let qa = orthonormalize(a);
    let qb = orthonormalize(b);
    let cos = singular_values(&(qa.transpose() * &qb));
    let resid = &qb - &qa * (qa.transpose() * &qb);
    let mut sin: Vec<f64> = singular_values(&resid).iter().copied().collect();
    sin.reverse();
    // cosines descend while sines ascend; atan2 keeps small angles accurate
    let k = cos.len().min(sin.len());
    let mut ang: Vec<f64> = (0..k).map(|i| sin[i].atan2(cos[i])).collect();
    ang.sort_by(f64::total_cmp);
    ang
}

/// Largest principal angle between two equidimensional spans.
pub fn subspace_distance(a: &Mat, b: &Mat) -> f64 {
    principal_angles(a, b).into_iter().fold(0.0, f64::max)
}

/// Dimension of the space of symmetric `n×n` matrices.
pub fn sym_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Isometric coordinates of a symmetric matrix (off-diagonals weighted by √2),
/// so that the Euclidean product equals `Tr(AB)`.
pub fn sym_to_vec(m: &Mat) -> Vct {
    let n = m.nrows();
    let r2 = std::f64::consts::SQRT_2;
    let mut v = Vct::zeros(sym_dim(n));
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            v[k] = if i == j { m[(i, i)] } else { r2 * 0.5 * (m[(i, j)] + m[(j, i)]) };
            k += 1;
        }
    }
    v
}

pub fn vec_to_sym(v: &Vct, n: usize) -> Mat {
    let r2 = std::f64::consts::SQRT_2;
    let mut m = Mat::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            if i == j {
                m[(i, i)] = v[k];
            } else {
                m[(i, j)] = v[k] / r2;
                m[(j, i)] = v[k] / r2;
            }
            k += 1;
        }
    }
    m
}

/// `Tr(AB)` for symmetric matrices.
pub fn trace_pair(a: &Mat, b: &Mat) -> f64 {
    a.component_mul(&b.transpose()).sum()
}

/// Frobenius-orthonormal basis of the span of symmetric matrices, dropping
/// directions below `rel_tol` relative to the largest singular value.
pub fn sym_span_basis(mats: &[Mat], rel_tol: f64) -> Vec<Mat> {
    if mats.is_empty() {
        return vec![];
    }
    let n = mats[0].nrows();
    let cols: Vec<Vct> = mats.iter().map(sym_to_vec).collect();
    let m = Mat::from_columns(&cols);
    let r = range_basis(&m, rel_tol);
    (0..r.ncols()).map(|j| vec_to_sym(&r.column(j).into_owned(), n)).collect()
}

/// Orthonormal basis of `{p symmetric : Tr(q p) = 0 for all q in mats}`.
pub fn sym_annihilator(mats: &[Mat], n: usize, rel_tol: f64) -> Vec<Mat> {
    let rows: Vec<Vct> = mats.iter().map(sym_to_vec).collect();
    if rows.is_empty() {
        let d = sym_dim(n);
        return (0..d).map(|k| vec_to_sym(&Vct::from_fn(d, |i, _| if i == k { 1.0 } else { 0.0 }), n)).collect();
    }
    let a = Mat::from_rows(&rows.iter().map(|r| r.transpose()).collect::<Vec<_>>());
    let k = null_space(&a, rel_tol);
    (0..k.ncols()).map(|j| vec_to_sym(&k.column(j).into_owned(), n)).collect()
}

/// Numerical rank of the Gram matrix of vectorized symmetric matrices.
pub fn sym_rank(mats: &[Mat], rel_tol: f64) -> usize {
    sym_span_basis(mats, rel_tol).len()
}

/// Geometric mean `A # B = A^{1/2}(A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}`.
pub fn geometric_mean(a: &Mat, b: &Mat) -> Mat {
    let (s, si) = sqrt_and_inv_sqrt(a);
    let (m, _) = sqrt_and_inv_sqrt(&symmetrize(&(&si * b * &si)));
    symmetrize(&(&s * m * &s))
}

/// Symmetric square root and inverse square root of a positive definite matrix.
pub fn sqrt_and_inv_sqrt(m: &Mat) -> (Mat, Mat) {
    let (vals, vecs) = sym_eigen(m);
    let s = Mat::from_diagonal(&vals.map(|x| x.max(0.0).sqrt()));
    let si = Mat::from_diagonal(&vals.map(|x| 1.0 / x.max(1e-300).sqrt()));
    (&vecs * s * vecs.transpose(), &vecs * si * vecs.transpose())
}

/// Wrap an angle difference into (-π, π].
pub fn wrap_angle(a: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut x = a % tau;
    if x <= -std::f64::consts::PI {
        x += tau;
    } else if x > std::f64::consts::PI {
        x -= tau;
    }
    x
}

/// Ordinary least-squares line `y = a + b x`; returns `(a, b)`.
pub fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - b * mx, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_vec_roundtrip_is_isometric() {
        let mut r = rng(3);
        let a = random_symmetric(&mut r, 4);
        let b = random_symmetric(&mut r, 4);
        let va = sym_to_vec(&a);
        assert!((va.dot(&sym_to_vec(&b)) - trace_pair(&a, &b)).abs() < 1e-12);
        assert!((vec_to_sym(&va, 4) - a).amax() < 1e-14);
    }

    #[test]
    fn annihilator_dimension() {
        let mut r = rng(5);
        let q = vec![random_symmetric(&mut r, 4), random_symmetric(&mut r, 4)];
        let ann = sym_annihilator(&q, 4, 1e-10);
        assert_eq!(ann.len(), 8);
        for p in &ann {
            for qi in &q {
                assert!(trace_pair(qi, p).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expm_of_diagonal() {
        let d = Mat::from_diagonal(&Vct::from_vec(vec![1.0, -2.0]));
        let e = expm(&d);
        assert!((e[(0, 0)] - 1f64.exp()).abs() < 1e-13);
        assert!((e[(1, 1)] - (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn principal_angle_of_rotated_line() {
        let a = Mat::from_column_slice(2, 1, &[1.0, 0.0]);
        let b = Mat::from_column_slice(2, 1, &[0.6f64.cos(), 0.6f64.sin()]);
        assert!((subspace_distance(&a, &b) - 0.6).abs() < 1e-12);
    }
}
