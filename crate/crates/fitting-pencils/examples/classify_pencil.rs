//! Classification tower of a few pencils: mixed, non-negatively regular,
//! ω-regular, maximal, with the Maslov winding of the boundary loop.

use fitting_pencils::linalg::{self, Mat};
use fitting_pencils::pencils::{self, ClassifyOptions, Pencil};
use fitting_pencils::symplectic::{self, SymplecticSpace};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let sp = SymplecticSpace::standard(2);
    let mut rng = linalg::rng(2);
    let opts = ClassifyOptions::default();
    let lagrangian_plane = pencils::random_lagrangian_plane(&mut rng, &sp, 0.5)?;
    let x = sp.x_lagrangian();
    let y = sp.y_lagrangian();
    let q = symplectic::pair_quadric(&sp, &x, &y)?.mat;
    let definite = Pencil::new(vec![Mat::identity(4, 4), q.clone()])?;
    let random = pencils::random_pencil(&mut rng, 4);
    for (name, p) in [("Lagrangian circle plane", &lagrangian_plane), ("plane through the identity", &definite), ("random plane", &random)] {
        let c = pencils::classify(p, &opts)?;
        println!("{name}: mixed {} nn-regular {} omega-regular {} maximal {} winding {:?}", c.mixed, c.nn_regular, c.omega_regular, c.maximal, c.winding);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
