//! Spacelike planes and surfaces of `H^{2,2}` through `Sp(4,R) → SO(2,3)`:
//! the boundary-circle family of quadrics and the Gauss map of a graph
//! surface.

use fitting_pencils::models::{self, GraphSurface};
use fitting_pencils::quadrics::FeasibilityOptions;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let r = models::theta_family_audit(32)?;
    println!("θ-family: exact at 0 {}, error at −θ {:.1e}, maximal {}, winding {:?}", r.exact_at_zero, r.reflected_angle_error, r.maximal, r.winding);
    println!("quadric at θ = 0 in the displayed basis:\n{}", models::displayed_quadric(0.0));
    let mild = GraphSurface { h4: [[0.3, 0.1], [0.1, -0.2]], h5: [[0.1, 0.0], [0.0, 0.2]], cubic: [0.0, 0.0] };
    let points = [[0.0, 0.0], [0.2, -0.1], [-0.3, 0.25]];
    for (name, s) in [("flat", GraphSurface::flat()), ("mild", mild)] {
        let a = models::spacelike_gauss_audit(&s, &points, 12, &FeasibilityOptions::default())?;
        let worst = a.samples.iter().map(|x| x.fitting_margin).fold(f64::INFINITY, f64::min);
        println!("{name} surface: bound violations {}, endpoint failures {}, fitting {} (margin {worst:.3})", a.bound_violations, a.endpoint_failures, a.fitting);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
