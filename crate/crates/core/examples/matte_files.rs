//! File-based matting: load an image and trimap, refine, save the alpha and trace.
//!
//! cargo run --example matte_files -- <image.png> <trimap.png> <alpha.png>
//!
//! Without arguments a synthetic pair is written to the temp directory first.

use std::fs::File;
use std::path::PathBuf;

use nwmatte::synth::{generate, SyntheticSpec};
use nwmatte::{load_image, load_trimap, run_pipeline, save_alpha, save_image, save_trimap, MattingConfig, RefinementParams};

fn main() -> nwmatte::Result<()> {
    let args: Vec<PathBuf> = std::env::args_os().skip(1).map(PathBuf::from).collect();
    let (image_path, trimap_path, alpha_path) = match args.as_slice() {
        [i, t, a] => (i.clone(), t.clone(), a.clone()),
        _ => {
            let dir = std::env::temp_dir().join("nwmatte-files");
            std::fs::create_dir_all(&dir)?;
            let c = generate(&SyntheticSpec { noise: 0.01, seed: 3, ..SyntheticSpec::new(64, 48) });
            save_image(dir.join("image.png"), &c.image)?;
            save_trimap(dir.join("trimap.png"), &c.with_band(10.0))?;
            (dir.join("image.png"), dir.join("trimap.png"), dir.join("alpha.png"))
        }
    };
    let image = load_image(&image_path)?;
    let trimap = load_trimap(&trimap_path)?;
    let result = run_pipeline(&image, &trimap, &MattingConfig::default(), &RefinementParams::default())?;
    save_alpha(&alpha_path, &result.matte)?;
    let trace_path = alpha_path.with_extension("trace.csv");
    result.trace.write_csv(File::create(&trace_path)?)?;
    println!("{} -> {} ({} refinement rows)", image_path.display(), alpha_path.display(), result.trace.records.len());
    Ok(())
}
