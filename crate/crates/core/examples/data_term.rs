//! Inspect the sampling data term on a three-pixel strip and on a noisy composite.

use nwmatte::dataterm::{compute_data_term, data_weights, estimate_alpha_pair, pair_confidence, pair_distance_ratio};
use nwmatte::pipeline::GAMMA_SCALE;
use nwmatte::synth::{generate, SyntheticSpec};
use nwmatte::{Image, Label, SamplingParams, Trimap};

fn main() -> nwmatte::Result<()> {
    let (f, b, i) = ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.0, 0.5]);
    let a = estimate_alpha_pair(i, f, b);
    let r = pair_distance_ratio(i, f, b, a);
    println!("single pair: alpha {a}, distance ratio {r}, confidence {:.4}", pair_confidence(r, 1.0, 1.0, 0.1));

    let image = Image::from_fn(3, 1, |x, _| [f, i, b][x]);
    let trimap = Trimap::new(3, 1, vec![Label::Foreground, Label::Unknown, Label::Background])?;
    let field = compute_data_term(&image, &trimap, &SamplingParams::default())?;
    println!("strip: alpha_hat {:?}, confidence {:?}", field.alpha_hat, field.confidence);

    let c = generate(&SyntheticSpec { noise: 0.03, seed: 4, ..SyntheticSpec::new(32, 32) });
    let field = compute_data_term(&c.image, &c.trimap, &SamplingParams::default())?;
    let weights = data_weights(&field, &c.trimap, GAMMA_SCALE)?;
    let n = field.len() as f64;
    let err = field.pixels.iter().zip(&field.alpha_hat).map(|(&z, &a)| (a - c.truth.get(z)).powi(2)).sum::<f64>() / n;
    let conf = field.confidence.iter().sum::<f64>() / n;
    let z = field.pixels[field.len() / 2];
    println!("noisy composite: {} unknowns, data-term mse {err:.3e}, mean confidence {conf:.3}", field.len());
    println!("pixel {z}: W_F {:.3}, W_B {:.3}", weights.to_fg[z], weights.to_bg[z]);
    Ok(())
}
