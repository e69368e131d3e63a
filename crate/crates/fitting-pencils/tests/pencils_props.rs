//! Properties of the classification tower, annihilators and fitting tests.

use fitting_pencils::linalg::{self, Mat};
use fitting_pencils::pencils::{self, ClassifyOptions, Pencil, PencilClass, TangentVector};
use fitting_pencils::quadrics::{FeasibilityOptions, EIG_TOL};
use fitting_pencils::symplectic::{self, SymplecticSpace};
use fitting_pencils::Status;
use proptest::prelude::*;
use rayon::prelude::*;

fn consistent(c: &PencilClass) -> bool {
    let implies = |a: Status, b: Status| !a.is_true() || b.is_true();
    implies(c.maximal, c.omega_regular) && implies(c.omega_regular, c.nn_regular) && implies(c.nn_regular, c.mixed)
}

fn sample_plane<R: rand::Rng>(rng: &mut R, n: usize, k: usize) -> Pencil {
    let sp = SymplecticSpace::standard(n);
    match k % 3 {
        0 => pencils::random_pencil(rng, 2 * n),
        1 => pencils::random_lagrangian_plane(rng, &sp, 0.8).unwrap(),
        _ => {
            // a Lagrangian plane perturbed off the maximal locus
            let p = pencils::random_lagrangian_plane(rng, &sp, 0.8).unwrap();
            let e = p.orthonormal_basis();
            let s = 0.6 * rng.random_range(0.0..1.0);
            Pencil::new(vec![&e[0] + linalg::random_symmetric(rng, 2 * n) * s, &e[1] + linalg::random_symmetric(rng, 2 * n) * s]).unwrap()
        }
    }
}

#[test]
fn tower_is_consistent_on_random_planes() {
    for n in 1..=3usize {
        let classes: Vec<PencilClass> = (0..500u64)
            .into_par_iter()
            .map(|j| {
                let mut rng = linalg::rng(linalg::substream(71 + n as u64, j));
                let p = sample_plane(&mut rng, n, j as usize);
                pencils::classify(&p, &ClassifyOptions { seed: j, ..Default::default() }).unwrap()
            })
            .collect();
        let bad = classes.iter().filter(|c| !consistent(c)).count();
        let maximal = classes.iter().filter(|c| c.maximal.is_true()).count();
        let winding_ok = classes.iter().filter(|c| c.maximal.is_true()).all(|c| c.winding.map(|w| w.unsigned_abs() as usize) == Some(n));
        assert_eq!(bad, 0, "n = {n}");
        assert!(maximal > 100, "n = {n}: only {maximal} maximal planes sampled");
        assert!(winding_ok, "n = {n}");
    }
}

#[test]
fn annihilator_is_trace_orthogonal_with_the_right_dimension() {
    let mut rng = linalg::rng(5);
    for n in 1..=3 {
        let p = pencils::random_pencil(&mut rng, 2 * n);
        let ann = pencils::annihilator(&p);
        assert_eq!(ann.len(), linalg::sym_dim(2 * n) - 2);
        for t in &ann {
            for q in &p.basis {
                assert!(linalg::trace_pair(q, &t.mat).abs() < 1e-12);
            }
        }
    }
    // span{diag(1, −1), offdiag} has annihilator span{I}
    let p = Pencil::new(vec![Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]), Mat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])]).unwrap();
    let ann = pencils::annihilator(&p);
    assert_eq!(ann.len(), 1);
    let m = &ann[0].mat;
    assert!((m[(0, 1)]).abs() < 1e-12 && (m[(0, 0)] - m[(1, 1)]).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn classify_is_invariant_under_basis_change_and_the_groups(seed in any::<u64>(), n in 1usize..=2, k in 0usize..3) {
        let mut rng = linalg::rng(seed);
        let p = sample_plane(&mut rng, n, k);
        let opts = ClassifyOptions::default();
        let c = pencils::classify(&p, &opts).unwrap();
        let m = linalg::gaussian_matrix(&mut rng, 2, 2) + Mat::identity(2, 2) * 1.5;
        prop_assume!(m.determinant().abs() > 0.2);
        let rebased = Pencil::new(vec![&p.basis[0] * m[(0, 0)] + &p.basis[1] * m[(0, 1)], &p.basis[0] * m[(1, 0)] + &p.basis[1] * m[(1, 1)]]).unwrap();
        let sl = linalg::random_sl(&mut rng, 2 * n, 0.4);
        let sp = symplectic::random_symplectic(&mut rng, n, 0.6);
        let same = |a: Status, b: Status| !(a.is_decided() && b.is_decided()) || a == b;
        let cb = pencils::classify(&rebased, &opts).unwrap();
        let cl = pencils::classify(&p.act(&sl).unwrap(), &opts).unwrap();
        let cs = pencils::classify(&p.act(&sp).unwrap(), &opts).unwrap();
        for other in [&cb, &cl, &cs] {
            prop_assert!(same(c.mixed, other.mixed));
            prop_assert!(same(c.nn_regular, other.nn_regular));
        }
        for other in [&cb, &cs] {
            prop_assert!(same(c.omega_regular, other.omega_regular));
            prop_assert!(same(c.maximal, other.maximal));
            if c.maximal.is_true() && other.maximal.is_true() {
                prop_assert_eq!(c.winding.map(i64::abs), other.winding.map(i64::abs));
            }
        }
    }

    /// A robustly fitting direction makes `(P_0, P_t)` fitting along the
    /// straight line `P_t = span(q_i + t v(q_i))`; a robustly non-fitting one
    /// does not.
    #[test]
    fn fitting_directions_integrate_to_fitting_pairs(seed in any::<u64>(), n in 1usize..=2, push in any::<bool>()) {
        let mut rng = linalg::rng(seed);
        let sp = SymplecticSpace::standard(n);
        let p = pencils::random_lagrangian_plane(&mut rng, &sp, 0.6).unwrap();
        let e = p.orthonormal_basis();
        let d = 2 * n;
        let bump = if push { Mat::identity(d, d) * 0.5 } else { Mat::zeros(d, d) };
        let images = vec![linalg::random_symmetric(&mut rng, d) * 0.5 + &bump, linalg::random_symmetric(&mut rng, d) * 0.5];
        let base = Pencil::new(e.clone()).unwrap();
        let v = TangentVector::new(base.clone(), images.clone()).unwrap();
        let r = pencils::fitting_direction(&v, &FeasibilityOptions::default()).unwrap();
        let margin = r.feasibility.as_ref().map(|f| f.primal_margin).unwrap_or(f64::NAN);
        prop_assume!(margin.abs() > 1e-2);
        for t in [1e-2, 1e-3] {
            let pt = Pencil::new(vec![&e[0] + &images[0] * t, &e[1] + &images[1] * t]).unwrap();
            prop_assume!(pencils::mixed_status(&pt, EIG_TOL).unwrap().is_true());
            let f = pencils::fitting_pair(&base, &pt, &FeasibilityOptions::default()).unwrap().fitting;
            if f.is_decided() {
                prop_assert_eq!(f, r.fitting, "t = {}, direction margin {:e}", t, margin);
            }
        }
    }

    /// Directions whose witnesses lie on the same ray `[q]` of the pencil form
    /// a convex cone: positive combinations stay fitting with witness at `q`.
    #[test]
    fn fitting_directions_sharing_a_witness_ray_form_a_cone(seed in any::<u64>(), n in 1usize..=2, a in 0.05f64..5.0, b in 0.05f64..5.0) {
        let mut rng = linalg::rng(seed);
        let sp = SymplecticSpace::standard(n);
        let p = pencils::random_lagrangian_plane(&mut rng, &sp, 0.6).unwrap();
        let e = p.orthonormal_basis();
        let d = 2 * n;
        let base = Pencil::new(e.clone()).unwrap();
        // v_k(e_0) positive modulo P, v_k(e_1) arbitrary
        let dir = |rng: &mut rand_chacha::ChaCha8Rng| {
            let g = linalg::gaussian_matrix(rng, d, d);
            vec![&g * g.transpose() / d as f64 + Mat::identity(d, d) * 0.1, linalg::random_symmetric(rng, d)]
        };
        let v1 = dir(&mut rng);
        let v2 = dir(&mut rng);
        let opts = FeasibilityOptions::default();
        let fit = |im: &[Mat]| pencils::fitting_direction(&TangentVector::new(base.clone(), im.to_vec()).unwrap(), &opts).unwrap().fitting;
        prop_assert_eq!(fit(&v1), Status::True);
        prop_assert_eq!(fit(&v2), Status::True);
        let combo: Vec<Mat> = v1.iter().zip(&v2).map(|(x, y)| x * a + y * b).collect();
        prop_assert_eq!(fit(&combo), Status::True);
    }
}
