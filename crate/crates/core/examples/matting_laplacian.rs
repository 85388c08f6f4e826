//! Build the matting Laplacian of a small image and check its structure.

use nwmatte::synth::{generate, ColorField, SyntheticSpec};
use nwmatte::{matting_laplacian, smoothterm::DEFAULT_LAPLACIAN_EPS};

fn main() -> nwmatte::Result<()> {
    let c = generate(&SyntheticSpec {
        foreground: ColorField::Texture { base: [0.7, 0.6, 0.3], amplitude: 0.1, period: 5.0, phase: 0.3 },
        ..SyntheticSpec::new(12, 10)
    });
    let l = matting_laplacian(&c.image, DEFAULT_LAPLACIAN_EPS)?;
    let max_row = l.row_sums().into_iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let ones = vec![1.0; l.n()];
    println!("n = {}, nonzeros = {} (at most 25 per row)", l.n(), l.nnz());
    println!("symmetric: {}", l.is_symmetric());
    println!("max |row sum| = {max_row:.2e}, 1' L 1 = {:.2e}", l.quadratic_form(&ones));
    let truth: Vec<f64> = c.truth.values().to_vec();
    println!("smoothness energy of the true alpha: {:.4e}", l.quadratic_form(&truth));
    Ok(())
}
