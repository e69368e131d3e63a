//! Properties of cross-ratio distances and limit subspaces.

use fitting_pencils::linalg::{self, Mat, Vct};
use fitting_pencils::nesting::{self, NestedPair};
use fitting_pencils::quadrics::Quadric;
use proptest::prelude::*;

fn random_pair<R: rand::Rng>(rng: &mut R, n: usize, step: f64) -> (Mat, Mat) {
    let d = 2 * n;
    let g = linalg::random_sl(rng, d, 0.4);
    let e: Vec<f64> = (0..d).map(|i| if i < n { 1.0 } else { -1.0 }).collect();
    let q1 = g.transpose() * Mat::from_diagonal(&Vct::from_row_slice(&e)) * &g;
    let a = linalg::gaussian_matrix(rng, d, d);
    let p = (&a * a.transpose() / d as f64 + Mat::identity(d, d) * 0.1) * (q1.norm() * step);
    let q2 = &q1 + p;
    (q1, q2)
}

fn cr(a: &Mat, b: &Mat, seed: u64) -> f64 {
    let pair = NestedPair::new(Quadric::new(a.clone()).unwrap(), Quadric::new(b.clone()).unwrap()).unwrap();
    nesting::cross_ratio_distance(&pair, 2000, seed).unwrap().value
}

fn balanced(q: &Mat, n: usize) -> bool {
    let ev = linalg::sym_eigenvalues(q);
    ev.iter().filter(|&&x| x < 0.0).count() == n && ev.iter().all(|x| x.abs() > 1e-9 * ev.amax())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cross_ratio_is_projective(seed in any::<u64>(), n in 1usize..=2, c1 in 0.1f64..10.0, c2 in 0.1f64..10.0) {
        let mut rng = linalg::rng(seed);
        let (q1, q2) = random_pair(&mut rng, n, 0.3);
        prop_assume!(balanced(&q2, n));
        let base = cr(&q1, &q2, 9);
        prop_assert!(base >= 1.0);
        let g = linalg::random_sl(&mut rng, 2 * n, 0.5) * 1.7;
        let conj = |q: &Mat| g.transpose() * q * &g;
        let r = cr(&(&q1 * c1), &(&q2 * c2), 9);
        let s = cr(&conj(&q1), &conj(&q2), 9);
        prop_assert!((r - base).abs() <= 1e-6 * base, "rescaled {} vs {}", r, base);
        prop_assert!((s - base).abs() <= 1e-6 * base, "conjugated {} vs {}", s, base);
    }

    #[test]
    fn cross_ratio_tends_to_one_as_the_pair_merges(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = linalg::rng(seed);
        let (q1, q2) = random_pair(&mut rng, n, 0.3);
        prop_assume!(balanced(&q2, n));
        let d = &q2 - &q1;
        let values: Vec<f64> = [1e-1, 1e-2, 1e-3].iter().map(|&e| cr(&q1, &(&q1 + &d * e), 3)).collect();
        prop_assert!(values.iter().all(|&v| v >= 1.0));
        prop_assert!(values[0] > values[1] && values[1] > values[2]);
        prop_assert!(values[2] < 1.01);
    }

    #[test]
    fn minimizing_line_reproduces_the_value(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = linalg::rng(seed);
        let (q1, q2) = random_pair(&mut rng, n, 0.5);
        prop_assume!(balanced(&q2, n));
        let pair = NestedPair::new(Quadric::new(q1).unwrap(), Quadric::new(q2).unwrap()).unwrap();
        let r = nesting::cross_ratio_distance(&pair, 2000, 4).unwrap();
        let (a, b) = (Vct::from_vec(r.argmin_line.0.clone()), Vct::from_vec(r.argmin_line.1.clone()));
        let again = nesting::line_cross_ratio(&pair, &a, &b).unwrap().value().unwrap();
        prop_assert!((again - r.value).abs() <= 1e-9 * r.value);
        // the closed form is never beaten by the search
        prop_assert!(r.search_value >= r.closed_form * (1.0 - 1e-9));
    }

    /// `q_t = gᵀ diag(−e^{−t}, …, e^{t}, …) g` nests and diverges; its
    /// non-positive sets shrink to the `n`-plane `g⁻¹·span(e_1..e_n)`.
    #[test]
    fn limit_subspace_of_a_diverging_sequence_is_n_dimensional(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = linalg::rng(seed);
        let d = 2 * n;
        let g = linalg::random_sl(&mut rng, d, 0.3);
        let seq: Vec<Quadric> = (0..=20)
            .map(|k| {
                let t = 0.6 * k as f64;
                let e: Vec<f64> = (0..d).map(|i| if i < n { -(-t).exp() } else { t.exp() }).collect();
                Quadric::new(g.transpose() * Mat::from_diagonal(&Vct::from_row_slice(&e)) * &g).unwrap()
            })
            .collect();
        let l = nesting::limit_subspace(&seq, 1e-13, 4000, seed).unwrap();
        prop_assert_eq!(l.dim, n);
        let gi = g.clone().try_inverse().unwrap();
        let expected = gi.columns(0, n).into_owned();
        let angle = linalg::principal_angles(&l.frame, &expected).iter().fold(0.0f64, |a, &b| a.max(b));
        prop_assert!(angle < 1e-3, "angle {angle:e}");
    }
}

#[test]
fn diagonal_pair_has_cross_ratio_nine_eighths() {
    let q1 = Quadric::new(Mat::from_diagonal(&Vct::from_row_slice(&[1.0, -1.0]))).unwrap();
    let q2 = Quadric::new(Mat::from_diagonal(&Vct::from_row_slice(&[2.0, -0.5]))).unwrap();
    let pair = NestedPair::new(q1, q2).unwrap();
    let r = nesting::cross_ratio_distance(&pair, 1000, 1).unwrap();
    assert!((r.value - 1.125).abs() < 1e-12);
}

#[test]
fn constant_sequence_does_not_converge_to_a_subspace() {
    let q = Quadric::new(Mat::from_diagonal(&Vct::from_row_slice(&[1.0, 1.0, -1.0, -1.0]))).unwrap();
    let l = nesting::limit_subspace(&vec![q; 10], 1e-13, 2000, 3).unwrap();
    assert!(!l.converged);
}
