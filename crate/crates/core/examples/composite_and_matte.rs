//! Build a synthetic composite with known alpha, matte it, and report the error.
//!
//! cargo run --example composite_and_matte -- [size] [noise]

use std::time::Instant;

use nwmatte::synth::{generate, Boundary, SyntheticSpec};
use nwmatte::{matte, mse, MattingConfig, MseRegion};

fn main() -> nwmatte::Result<()> {
    let mut args = std::env::args().skip(1);
    let size: usize = args.next().map_or(64, |s| s.parse().expect("size"));
    let noise: f64 = args.next().map_or(0.0, |s| s.parse().expect("noise"));

    let c = generate(&SyntheticSpec {
        boundary: Boundary::Circle { radius: size as f64 * 0.3 },
        noise,
        seed: 1,
        ..SyntheticSpec::new(size, size)
    });
    let start = Instant::now();
    let out = matte(&c.image, &c.trimap, &MattingConfig::default())?;
    println!(
        "{size}x{size}, noise {noise}: mse {:.3e} over {} unknown pixels, {} CG iterations, {:.1} ms",
        mse(&out.matte, &c.truth, MseRegion::UnknownOnly, &c.trimap)?,
        c.trimap.unknown_indices().len(),
        out.iterations,
        start.elapsed().as_secs_f64() * 1e3
    );
    Ok(())
}
