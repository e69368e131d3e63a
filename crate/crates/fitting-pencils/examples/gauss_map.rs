//! Gauss map of the symmetric space along diagonal geodesics: the quadric
//! derivative is positive exactly when no eigen-datum vanishes.

use fitting_pencils::flows;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for lam in [vec![1.0, -1.0], vec![2.0, -1.0, -1.0], vec![1.0, 0.0, -1.0]] {
        let g = flows::gauss_map_geodesic(&lam, 0.5)?;
        let fd = flows::gauss_map_fd(&lam, 0.5, 1e-5)?;
        println!("λ = {lam:?}: fitting {}, finite-difference error {:.1e}", g.fitting, (&fd - &g.derivative).amax());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
