//! Properties of the `H³` and `H^{2,2}` models, the renderer and JSON I/O.

use fitting_pencils::io;
use fitting_pencils::linalg::{self, Mat};
use fitting_pencils::models::{self, HermitianForm, PairKind, SpacelikePlaneH22};
use fitting_pencils::pencils;
use fitting_pencils::render::{self, Chart};
use fitting_pencils::hyperbolic::C64;
use fitting_pencils::symplectic::{self, Lagrangian, LagrangianLoop, SymplecticSpace};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn coords() -> impl Strategy<Value = [f64; 4]> {
    proptest::array::uniform4(-3.0f64..3.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_realization_is_linear_and_injective(a in coords(), b in coords(), s in -2.0f64..2.0) {
        let h = |c: [f64; 4]| HermitianForm::from_coords(c[0], c[1], c[2], c[3]);
        let r = |c: [f64; 4]| models::hermitian_to_real(&h(c)).mat;
        let sum = [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]];
        prop_assert!((r(sum) - (r(a) + r(b) * s)).amax() < 1e-12);
        let back = models::real_to_hermitian(&r(a)).unwrap().coords();
        for k in 0..4 {
            prop_assert!((back[k] - a[k]).abs() < 1e-12);
        }
        // the real form evaluates the Hermitian one
        let v = [C64::new(b[0], b[1]), C64::new(b[2], b[3])];
        let x = linalg::Vct::from_row_slice(&b);
        prop_assert!((x.dot(&(r(a) * &x)) - h(a).eval(&v)).abs() < 1e-10 * (1.0 + x.norm_squared()));
    }

    #[test]
    fn so23_map_is_a_homomorphism_into_so23(seed in any::<u64>()) {
        let mut rng = linalg::rng(seed);
        let a = symplectic::random_symplectic(&mut rng, 2, 1.0);
        let b = symplectic::random_symplectic(&mut rng, 2, 1.0);
        let fa = models::sp4_so23(&a).unwrap();
        let fab = models::sp4_so23(&(&a * &b)).unwrap();
        let prod = &fa * models::sp4_so23(&b).unwrap();
        prop_assert!((&fab - &prod).amax() < 1e-8 * prod.amax());
        prop_assert!(models::so23_residual(&fa) < 1e-8 * fa.amax().powi(2));
    }

    #[test]
    fn transverse_lagrangians_give_non_orthogonal_isotropic_lines(seed in any::<u64>()) {
        let sp = SymplecticSpace::standard(2);
        let mut rng = linalg::rng(seed);
        let a = symplectic::random_lagrangian(&mut rng, &sp);
        let b = symplectic::random_lagrangian(&mut rng, &sp);
        let va = models::lagrangian_to_isotropic(&a).unwrap();
        let vb = models::lagrangian_to_isotropic(&b).unwrap();
        prop_assert!(models::minkowski(&va, &va).abs() < 1e-10 * va.norm_squared());
        let pairing = models::minkowski(&va, &vb).abs() / (va.norm() * vb.norm());
        if a.transversality(&b) > 1e-3 {
            prop_assert!(pairing > 1e-8);
        }
        // a Lagrangian meeting `a` in a line: `span(u, y)` with `y` in `u^ω` outside `a`
        let u = a.frame.column(0).into_owned();
        let y = linalg::gaussian_vector(&mut rng, 4);
        let w = b.frame.column(0).into_owned();
        prop_assume!(sp.pairing(&u, &w).abs() > 1e-2 * w.norm() * u.norm());
        let y = &y - &w * (sp.pairing(&u, &y) / sp.pairing(&u, &w));
        let c = Lagrangian::new(&sp, Mat::from_columns(&[u, y])).unwrap();
        let vc = models::lagrangian_to_isotropic(&c).unwrap();
        prop_assert!(models::minkowski(&va, &vc).abs() < 1e-8);
        let l = models::isotropic_to_lagrangian(&va).unwrap();
        prop_assert!(l.distance(&a) < 1e-8);
    }

    #[test]
    fn geodesic_disjointness_is_mobius_invariant(seed in any::<u64>(), k in 0usize..4) {
        let mut rng = linalg::rng(seed);
        let kind = [PairKind::Generic, PairKind::Meeting, PairKind::Coplanar, PairKind::SharedEndpoint][k];
        let (g1, g2) = models::random_geodesic_pair(&mut rng, kind);
        let m = models::random_sl2c(&mut rng, 0.8);
        let (s0, d0) = models::geodesics_disjoint(&g1, &g2);
        let (s1, d1) = models::geodesics_disjoint(&g1.act(&m), &g2.act(&m));
        if s0.is_decided() && s1.is_decided() {
            prop_assert_eq!(s0, s1);
        }
        prop_assert!((d0 - d1).abs() < 1e-6 * (1.0 + d0));
        let (_, err) = models::pencil_geodesic_roundtrip(&g1).unwrap();
        prop_assert!(err < 1e-9);
    }

    #[test]
    fn rendering_is_deterministic(r1 in 0.2f64..1.8, r2 in 0.2f64..1.8, cx in -0.5f64..0.5) {
        let circle = |r: f64| Mat::from_row_slice(3, 3, &[1.0, 0.0, -cx, 0.0, 1.0, 0.0, -cx, 0.0, cx * cx - r * r]);
        let conics = [circle(r1), circle(r2)];
        let a = render::render_conics(&conics, &Chart::default()).unwrap();
        let b = render::render_conics(&conics, &Chart::default()).unwrap();
        prop_assert_eq!(&a.svg, &b.svg);
        prop_assert_eq!(a.svg.matches("<path").count() + a.omitted.len(), 2);
    }

    #[test]
    fn matrices_and_pencils_roundtrip_through_json(seed in any::<u64>(), n in 1usize..=3) {
        let mut rng = linalg::rng(seed);
        let p = pencils::random_pencil(&mut rng, 2 * n);
        let m = &p.basis[0];
        let text = serde_json::to_string(&io::MatrixJson::from_mat(m)).unwrap();
        prop_assert_eq!(&io::parse_matrix(&text).unwrap(), m);
        let pj = serde_json::to_string(&io::pencil_json(&p.basis)).unwrap();
        prop_assert_eq!(io::parse_pencil_basis(&pj).unwrap(), p.basis.clone());
    }
}

#[test]
fn plane_boundary_loop_has_the_pencil_winding() {
    let pl = SpacelikePlaneH22::standard();
    let k = 256;
    let params: Vec<f64> = (0..k).map(|j| TAU * j as f64 / k as f64).collect();
    let samples = params.iter().map(|&t| pl.boundary_lagrangian(t).unwrap()).collect();
    let w_circle = symplectic::maslov_winding(&LagrangianLoop::new(samples, params).unwrap()).unwrap();
    let pencil = models::spacelike_plane_pencil(&pl).unwrap();
    let w_pencil = symplectic::maslov_winding(&pencils::boundary_loop(&pencil, 128).unwrap()).unwrap();
    assert_eq!(w_circle.abs(), 2);
    assert_eq!(w_circle.abs(), w_pencil.abs());
}

#[test]
fn hermitian_circles_render_on_the_unit_circle() {
    let h = HermitianForm::from_coords(1.0, -1.0, 0.0, 0.0);
    let r = render::render_conics(&[render::hermitian_conic(&h)], &Chart::default()).unwrap();
    assert!(r.omitted.is_empty() && r.segments[0] > 50);
}
