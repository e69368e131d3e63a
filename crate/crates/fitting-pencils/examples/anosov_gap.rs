//! Singular value gap audit of a Schottky group under both embeddings:
//! the bound `log(σ_n/σ_{n+1}) ≥ A·|γ| + B` over reduced words.

use fitting_pencils::reps::{self, Embedding};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let rep = reps::default_schottky();
    for emb in [Embedding::irreducible(2), Embedding::diagonal(2)] {
        let g = reps::anosov_gap_audit(&rep, &emb, 8)?;
        println!(
            "{:?} n=2: {} words, A = {:.4}, B = {:.4}, slack {:.1e}, generator power slopes {:?}",
            emb.kind,
            g.words.len(),
            g.slope,
            g.intercept,
            g.bound_slack,
            g.power_slopes.iter().map(|s| format!("{s:.3}")).collect::<Vec<_>>()
        );
    }
    let genus2 = reps::build_genus2();
    println!("genus-two relator residual {:.1e}", reps::genus2_relator_residual(&genus2));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
