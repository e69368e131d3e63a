//! SVG pictures: nested conics of a flow line and the circles of a pencil
//! of Hermitian forms.

use fitting_pencils::flows::{self, PencilField};
use fitting_pencils::hyperbolic::{UnitTangent, C64};
use fitting_pencils::linalg::Mat;
use fitting_pencils::models::HermitianForm;
use fitting_pencils::reps::Embedding;
use fitting_pencils::render::{self, Chart};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let field = PencilField::averaged(&Embedding::irreducible(1), 128)?;
    let v = UnitTangent { x: C64::new(0.0, 1.0), angle: 0.3 };
    // the flow quadrics live on R², so pad them to conics of the chart z = 1 with a unit z²-term
    let conics: Vec<Mat> = [0.0, 0.5, 1.0, 1.5]
        .iter()
        .map(|&t| {
            let q = field.quadric(&flows::geodesic_flow_step(&field.sample(v), &field, t).tangent);
            let mut m = Mat::zeros(3, 3);
            m.view_mut((0, 0), (2, 2)).copy_from(&(&q / q.norm()));
            m[(2, 2)] = -0.5;
            m
        })
        .collect();
    let r = render::render_conics(&conics, &Chart::default())?;
    let dir = std::env::temp_dir();
    std::fs::write(dir.join("flow_conics.svg"), &r.svg)?;
    println!("flow conics: segments {:?}, omitted {:?}", r.segments, r.omitted);
    let circles: Vec<Mat> = (1..=3).map(|k| render::hermitian_conic(&HermitianForm::from_coords(1.0, -(k as f64) * 0.4, 0.2, 0.0))).collect();
    let r = render::render_conics(&circles, &Chart::default())?;
    std::fs::write(dir.join("hermitian_circles.svg"), &r.svg)?;
    println!("hermitian circles: segments {:?}; written to {}", r.segments, dir.display());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
