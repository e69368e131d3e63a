//! Properties of pair quadrics, Maslov indices and windings.

use fitting_pencils::linalg::{self, Mat};
use fitting_pencils::symplectic::{self, Lagrangian, SymplecticSpace};
use proptest::prelude::*;

fn transverse_pair<R: rand::Rng>(rng: &mut R, sp: &SymplecticSpace) -> (Lagrangian, Lagrangian) {
    loop {
        let a = symplectic::random_lagrangian(rng, sp);
        let b = symplectic::random_lagrangian(rng, sp);
        if a.transversality(&b) > 1e-2 {
            return (a, b);
        }
    }
}

fn pd<R: rand::Rng>(rng: &mut R, n: usize) -> Mat {
    let a = linalg::gaussian_matrix(rng, n, n);
    &a * a.transpose() / n as f64 + Mat::identity(n, n) * 0.2
}

/// `q_{ℓ⁺(t),ℓ⁻(t)}` for `ℓ⁺(t) = g·[I; tS]` and `ℓ⁻(t) = g·[tT; I]`.
fn moving_pair_quadric(sp: &SymplecticSpace, g: &Mat, s: &Mat, t_mat: &Mat, t: f64) -> Mat {
    let n = sp.n;
    let mut fp = Mat::zeros(2 * n, n);
    fp.view_mut((0, 0), (n, n)).copy_from(&Mat::identity(n, n));
    fp.view_mut((n, 0), (n, n)).copy_from(&(s * t));
    let mut fm = Mat::zeros(2 * n, n);
    fm.view_mut((0, 0), (n, n)).copy_from(&(t_mat * t));
    fm.view_mut((n, 0), (n, n)).copy_from(&Mat::identity(n, n));
    let lp = Lagrangian::new(sp, g * fp).unwrap();
    let lm = Lagrangian::new(sp, g * fm).unwrap();
    symplectic::pair_quadric(sp, &lp, &lm).unwrap().mat
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pair_quadric_annihilates_both_frames(seed in any::<u64>(), n in 1usize..=4) {
        let sp = SymplecticSpace::standard(n);
        let mut rng = linalg::rng(seed);
        let (a, b) = transverse_pair(&mut rng, &sp);
        let q = symplectic::pair_quadric(&sp, &a, &b).unwrap().mat;
        for l in [&a, &b] {
            let f = l.orthonormal_frame();
            prop_assert!((f.transpose() * &q * &f).amax() < 1e-10);
        }
        let r = symplectic::pair_quadric(&sp, &b, &a).unwrap().mat;
        prop_assert!((&q + &r).amax() < 1e-10 * q.amax().max(1.0));
    }

    #[test]
    fn pair_quadric_polarizes_to_half_omega_and_is_equivariant(seed in any::<u64>(), n in 1usize..=3) {
        let sp = SymplecticSpace::standard(n);
        let mut rng = linalg::rng(seed);
        let (a, b) = transverse_pair(&mut rng, &sp);
        let q = symplectic::pair_quadric(&sp, &a, &b).unwrap();
        let v = a.frame.clone() * linalg::gaussian_vector(&mut rng, n);
        let w = b.frame.clone() * linalg::gaussian_vector(&mut rng, n);
        prop_assert!((q.bilinear(&v, &w) - 0.5 * sp.pairing(&v, &w)).abs() < 1e-9 * (v.norm() * w.norm()).max(1.0));
        let g = symplectic::random_symplectic(&mut rng, n, 0.7);
        let qg = symplectic::pair_quadric(&sp, &a.act(&g), &b.act(&g)).unwrap();
        for _ in 0..4 {
            let x = linalg::gaussian_vector(&mut rng, 2 * n);
            let gx = &g * &x;
            prop_assert!((qg.eval(&gx) - q.eval(&x)).abs() < 1e-10 * x.norm_squared().max(1.0) * q.frobenius().max(1.0) * g.norm().powi(2));
        }
    }

    /// Exact integer invariance under 1000 random symplectic changes of basis
    /// over the whole run.
    #[test]
    fn maslov_index_is_symplectic_invariant(seed in any::<u64>(), n in 1usize..=3) {
        let sp = SymplecticSpace::standard(n);
        let mut rng = linalg::rng(seed);
        let eps: Vec<f64> = (0..n).map(|i| if (seed >> i) & 1 == 0 { 1.0 } else { -1.0 }).collect();
        let h = symplectic::random_symplectic(&mut rng, n, 1.0);
        let t = sp.normal_form_triple(&eps).map(|l| l.act(&h));
        let m = symplectic::maslov_index(&sp, &t[0], &t[1], &t[2]).unwrap();
        prop_assert_eq!(m, eps.iter().sum::<f64>() as i64);
        for _ in 0..21 {
            let g = symplectic::random_symplectic(&mut rng, n, 1.0);
            let mg = symplectic::maslov_index(&sp, &t[0].act(&g), &t[1].act(&g), &t[2].act(&g)).unwrap();
            prop_assert_eq!(mg, m);
        }
    }

    /// Curves `ℓ^±(t)` tangent to `Hom(ℓ^±, ℓ^∓)` with `ω(·, u⁺·)` and
    /// `ω(u⁻·, ·)` definite of one sign: the pair quadric moves definitely,
    /// positively when both forms are negative, which is the orientation in
    /// which `(ℓ⁺(0), ℓ⁻(0), ℓ⁻(t), ℓ⁺(t))` is a maximal quadruple.
    #[test]
    fn pair_quadric_derivative_along_opposite_motions(seed in any::<u64>(), n in 1usize..=3) {
        let sp = SymplecticSpace::standard(n);
        let mut rng = linalg::rng(seed);
        let g = symplectic::random_symplectic(&mut rng, n, 0.6);
        let (s, t_mat) = (pd(&mut rng, n), pd(&mut rng, n));
        let gi = g.clone().try_inverse().unwrap();
        // d/dt at 0 of q_t(a, b) is −(aᵀSa + bᵀTb) in the coordinates of g
        let mut block = Mat::zeros(2 * n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(&s);
        block.view_mut((n, n), (n, n)).copy_from(&t_mat);
        let derivative = linalg::symmetrize(&(gi.transpose() * &block * &gi));
        let analytic = linalg::lambda_min(&derivative).0;
        prop_assert!(analytic > 0.0);
        for sign in [-1.0, 1.0] {
            // sign −1: ω(·, u⁺·) and ω(u⁻·, ·) negative definite
            let (ss, tt) = (&s * sign, &t_mat * sign);
            let q0 = moving_pair_quadric(&sp, &g, &ss, &tt, 0.0);
            for t in [1e-2, 1e-3] {
                let dq = (moving_pair_quadric(&sp, &g, &ss, &tt, t) - &q0) / t;
                let m = linalg::lambda_min(&(&dq * -sign)).0;
                prop_assert!(m >= 0.5 * analytic, "sign {sign} t {t}: margin {m:e} vs analytic {analytic:e}");
            }
        }
        // the negative-sign motion makes the quadruple maximal
        let q = |t: f64, which: usize| {
            let mut f = Mat::zeros(2 * n, n);
            if which == 0 {
                f.view_mut((0, 0), (n, n)).copy_from(&Mat::identity(n, n));
                f.view_mut((n, 0), (n, n)).copy_from(&(&s * -t));
            } else {
                f.view_mut((0, 0), (n, n)).copy_from(&(&t_mat * -t));
                f.view_mut((n, 0), (n, n)).copy_from(&Mat::identity(n, n));
            }
            Lagrangian::new(&sp, &g * f).unwrap()
        };
        // maximal only for small t: for n = 1 this needs t² S T < 1
        let top = |m: &Mat| linalg::sym_eigenvalues(m).amax();
        let t1 = 0.5 / (top(&s) * top(&t_mat)).sqrt();
        let quad = [q(0.0, 0), q(0.0, 1), q(t1, 1), q(t1, 0)];
        prop_assert!(symplectic::is_maximal_quadruple(&sp, [&quad[0], &quad[1], &quad[2], &quad[3]]).unwrap());
    }

    #[test]
    fn winding_adds_under_concatenation_and_negates_under_reversal(seed in any::<u64>(), n in 1usize..=3) {
        let sp = SymplecticSpace::standard(n);
        let mut rng = linalg::rng(seed);
        let e1: Vec<f64> = (0..n).map(|_| if rand::Rng::random_bool(&mut rng, 0.5) { 1.0 } else { -1.0 }).collect();
        let e2: Vec<f64> = (0..n).map(|_| if rand::Rng::random_bool(&mut rng, 0.5) { 1.0 } else { -1.0 }).collect();
        let g = symplectic::random_symplectic(&mut rng, n, 0.5);
        let a = symplectic::tau_zero_loop(&sp, &e1, 128).act(&g);
        let b = symplectic::tau_zero_loop(&sp, &e2, 128).act(&g);
        let wa = symplectic::maslov_winding(&a).unwrap();
        let wb = symplectic::maslov_winding(&b).unwrap();
        prop_assert_eq!(wa, e1.iter().sum::<f64>() as i64);
        prop_assert_eq!(symplectic::maslov_winding(&a.concat(&b)).unwrap(), wa + wb);
        prop_assert_eq!(symplectic::maslov_winding(&a.reversed()).unwrap(), -wa);
    }

    #[test]
    fn lagrangians_stay_isotropic_under_the_group(seed in any::<u64>(), n in 1usize..=4) {
        let sp = SymplecticSpace::standard(n);
        let mut rng = linalg::rng(seed);
        let g = symplectic::random_symplectic(&mut rng, n, 1.0);
        prop_assert!(sp.symplectic_residual(&g) < 1e-9);
        let l = symplectic::random_lagrangian(&mut rng, &sp).act(&g);
        prop_assert!(l.isotropy_residual(&sp) < 1e-10);
    }
}
