//! Cross-ratio distance of nested quadrics: closed form against the line
//! search, and the Hilbert distance of positive tensors.

use fitting_pencils::linalg::{Mat, Vct};
use fitting_pencils::nesting::{self, NestedPair};
use fitting_pencils::quadrics::{self, Quadric, SymTensor};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let q1 = Quadric::new(Mat::from_diagonal(&Vct::from_row_slice(&[1.0, -1.0])))?;
    let q2 = Quadric::new(Mat::from_diagonal(&Vct::from_row_slice(&[2.0, -0.5])))?;
    let pair = NestedPair::new(q1, q2)?;
    let r = nesting::cross_ratio_distance(&pair, 2000, 5)?;
    println!("nested diagonal pair: cross ratio {:.6} (closed form {:.6}, search {:.6}, {} lines)", r.value, r.closed_form, r.search_value, r.lines_searched);
    let a = nesting::line_cross_ratio(&pair, &Vct::from_row_slice(&[1.0, 0.0]), &Vct::from_row_slice(&[0.0, 1.0]))?;
    println!("on the coordinate line: {a:?}");
    let p1 = SymTensor::new(Mat::identity(3, 3))?;
    let p2 = SymTensor::new(Mat::from_diagonal(&Vct::from_row_slice(&[1.0, 2.0, 4.0])))?;
    println!("Hilbert distance of I and diag(1, 2, 4): {:.6} (log 4 = {:.6})", quadrics::hilbert_distance(&p1, &p2)?, 4f64.ln());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
