//! Maslov indices of the normal-form triples, before and after a random
//! symplectic change of basis, and the winding of the basic loops.

use fitting_pencils::linalg;
use fitting_pencils::symplectic::{self, SymplecticSpace};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let n = 3;
    let sp = SymplecticSpace::standard(n);
    let mut rng = linalg::rng(1);
    let g = symplectic::random_symplectic(&mut rng, n, 1.0);
    for eps in [[1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [-1.0, -1.0, 1.0], [-1.0, -1.0, -1.0]] {
        let [a, b, c] = sp.normal_form_triple(&eps);
        let m = symplectic::maslov_index(&sp, &a, &b, &c)?;
        let mg = symplectic::maslov_index(&sp, &a.act(&g), &b.act(&g), &c.act(&g))?;
        let maximal = symplectic::is_maximal_triple(&sp, &a, &b, &c)?;
        println!("eps {eps:?}: index {m}, after conjugation {mg}, maximal {maximal}");
        assert_eq!(m, mg);
        let w = symplectic::maslov_winding(&symplectic::tau_zero_loop(&sp, &eps, 256))?;
        println!("  loop through the normal forms winds {w}");
    }
    let tau = symplectic::tau_loop(&sp, 256)?;
    println!("generator loop winds {}, reversed {}", symplectic::maslov_winding(&tau)?, symplectic::maslov_winding(&tau.reversed())?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
