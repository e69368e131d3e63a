//! Fibers of the averaged pencil field through positive tensors and through
//! rank-one tensors on the limit set.

use fitting_pencils::flows::{self, PencilField};
use fitting_pencils::reps::{self, Embedding};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = PencilField::averaged(&Embedding::irreducible(1), 256)?;
    let r = flows::fibration_audit(&field, &reps::default_schottky(), 20, 5, 9)?;
    println!(
        "interior fiber counts {:?}, limit fiber counts {:?}, root residual {:.1e}: {}",
        r.interior_histogram, r.limit_histogram, r.root_residual, r.status
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
