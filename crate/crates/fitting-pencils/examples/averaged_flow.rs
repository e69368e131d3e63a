//! The averaged pencil field of the Veronese embedding: equivariance,
//! strict nesting along the geodesic flow, contraction rate and limit
//! subspaces.

use fitting_pencils::flows::{self, PencilField};
use fitting_pencils::hyperbolic::{self, UnitTangent, C64};
use fitting_pencils::linalg;
use fitting_pencils::pencils::{self, ClassifyOptions};
use fitting_pencils::reps::{self, Embedding};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let emb = Embedding::irreducible(2);
    let field = PencilField::averaged(&emb, 256)?;
    let rep = reps::default_schottky();
    let x = C64::new(0.3, 1.2);
    println!("equivariance residual {:.1e}", field.equivariance_residual(&rep.letters(), &[x])?);
    let c = pencils::classify(&field.pencil(x)?, &ClassifyOptions::default())?;
    println!("pencil at {x}: maximal {}, winding {:?}", c.maximal, c.winding);
    let mut rng = linalg::rng(6);
    println!("nestedness margin {:.3e}", flows::nestedness_audit(&field, &mut rng, 20, &[0.1, 0.5, 1.0]));
    let v = UnitTangent { x: C64::new(0.0, 1.0), angle: std::f64::consts::FRAC_PI_2 };
    let r = flows::contraction_audit(&field, &v, &[0.5, 1.0, 2.0, 3.0], 1000, 7)?;
    println!("contraction: α = {:.3}, log cr {:?}", r.alpha, r.log_cr.iter().map(|l| format!("{l:.3}")).collect::<Vec<_>>());
    let l = flows::limit_audit(&field, &v, flows::limit_horizon(&emb), 40, true, 8)?;
    println!("limit subspace vs boundary Lagrangian at {:?}: angle {:.1e}", hyperbolic::forward_endpoint(&v), l.angle);
    println!("fiber circle winding {}", flows::field_winding_audit(&field, x, 0.1, 64)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
