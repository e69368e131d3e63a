//! Geodesics of `H³` as pencils of Hermitian forms: two geodesics are
//! disjoint exactly when their pencils fit.

use fitting_pencils::linalg;
use fitting_pencils::models::{self, Cp1, GeodesicH3, PairKind};
use fitting_pencils::quadrics::FeasibilityOptions;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let opts = FeasibilityOptions::default();
    let axis = GeodesicH3::new(Cp1::parse("0")?, Cp1::Infinity)?;
    for other in [["1", "2"], ["-1", "1"], ["0", "3:1"]] {
        let g = GeodesicH3::new(Cp1::parse(other[0])?, Cp1::parse(other[1])?)?;
        let c = models::geodesics_fitting_crosscheck(&axis, &g, &opts)?;
        println!("(0, ∞) vs ({}, {}): disjoint {}, distance {:.4}, fitting {}", other[0], other[1], c.disjoint, c.distance, c.fitting);
    }
    let (_, err) = models::pencil_geodesic_roundtrip(&axis)?;
    println!("pencil → geodesic roundtrip error {err:.1e}");
    let mut rng = linalg::rng(10);
    let (g1, g2) = models::random_geodesic_pair(&mut rng, PairKind::Generic);
    println!("random pair: {:?}", models::geodesics_fitting_crosscheck(&g1, &g2, &opts)?.agree);
    let a = models::spacelike_fitting_audit(40, &opts, 11)?;
    println!("spacelike tangents fitting {}/{}, non-spacelike fitting example {:?}", a.spacelike_fitting, a.spacelike_samples, a.timelike_fitting_example);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
