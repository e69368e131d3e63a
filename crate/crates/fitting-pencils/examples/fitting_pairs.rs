//! Fitting test for pairs of pencils, checked against the sampled geometric
//! criterion, and the first-order test along a tangent direction.

use fitting_pencils::linalg;
use fitting_pencils::pencils::{self, TangentVector};
use fitting_pencils::quadrics::FeasibilityOptions;
use fitting_pencils::symplectic::SymplecticSpace;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sp = SymplecticSpace::standard(1);
    let mut rng = linalg::rng(3);
    let opts = FeasibilityOptions::default();
    for k in 0..4 {
        let p1 = pencils::random_lagrangian_plane(&mut rng, &sp, 0.8)?;
        let p2 = pencils::random_lagrangian_plane(&mut rng, &sp, 0.8)?;
        let r = pencils::fitting_pair(&p1, &p2, &opts)?;
        let (g, _) = pencils::geometric_fitting(&p1, &p2, 4000, &mut rng)?;
        let margin = r.feasibility.as_ref().map(|f| f.primal_margin).unwrap_or(f64::NAN);
        println!("pair {k}: fitting {} (margin {margin:.3e}), geometric criterion {g}", r.fitting);
    }
    let p = pencils::random_lagrangian_plane(&mut rng, &sp, 0.8)?;
    println!("a pencil with itself: {}", pencils::fitting_pair(&p, &p, &opts)?.fitting);
    // moving the basis by +I on both quadrics is a fitting direction
    let id = linalg::Mat::identity(2, 2);
    let v = TangentVector::new(p.clone(), vec![id.clone(), id])?;
    println!("direction adding the identity: {}", pencils::fitting_direction(&v, &opts)?.fitting);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
