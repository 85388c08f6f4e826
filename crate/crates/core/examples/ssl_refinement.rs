//! Trimap self-refinement on a coarse trimap, printing each promotion round.

use nwmatte::ssl::{Scoring, StepView};
use nwmatte::synth::{generate, Boundary, SyntheticSpec};
use nwmatte::{run_pipeline_with, Label, MattingConfig, MseRegion, RefinementParams};

fn main() -> nwmatte::Result<()> {
    let c = generate(&SyntheticSpec {
        boundary: Boundary::Line { angle: 0.7 },
        noise: 0.02,
        seed: 9,
        ..SyntheticSpec::new(48, 48)
    });
    let coarse = c.with_band(14.0);
    let scoring = Scoring { truth: &c.truth, region: MseRegion::UnknownOnly };
    let result = run_pipeline_with(
        &c.image,
        &coarse,
        &MattingConfig::default(),
        &RefinementParams::default(),
        Some(scoring),
        |v: &StepView<'_>| {
            let wrong = v
                .refinement
                .promoted
                .iter()
                .filter(|&&(p, l)| (l == Label::Foreground) != (c.truth.get(p) > 0.5))
                .count();
            println!("round {}: promoted {} pixels, {wrong} against the truth", v.iteration, v.refinement.count());
        },
    )?;
    let mut csv = Vec::new();
    result.trace.write_csv(&mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    Ok(())
}
