//! Write a synthetic benchmark directory, ingest it, and evaluate it like `nwmatte eval`.
//!
//! cargo run --example benchmark_layout -- [out-dir]

use std::fs::File;
use std::path::PathBuf;

use nwmatte::eval::{ingest_benchmark, iteration_curve, write_results_csv, EvalRecord};
use nwmatte::synth::suite;
use nwmatte::{save_alpha, save_image, save_trimap, MattingConfig, MseRegion, RefinementParams};

fn main() -> nwmatte::Result<()> {
    let root = std::env::args().nth(1).map_or_else(|| std::env::temp_dir().join("nwmatte-bench"), PathBuf::from);
    for sub in ["input", "trimap1", "trimap2", "gt"] {
        std::fs::create_dir_all(root.join(sub))?;
    }
    for (i, c) in suite(40, 40, 6, 6.0).into_iter().enumerate() {
        let name = format!("syn{i:02}.png");
        save_image(root.join("input").join(&name), &c.image)?;
        save_trimap(root.join("trimap1").join(&name), &c.trimap)?;
        save_trimap(root.join("trimap2").join(&name), &c.with_band(12.0))?;
        save_alpha(root.join("gt").join(&name), &c.truth)?;
    }

    let set = ingest_benchmark(&root)?;
    println!("{}: {} entries", root.display(), set.entries.len());
    let config = MattingConfig::default();
    let params = RefinementParams::default();
    let mut records = Vec::new();
    for entry in &set.entries {
        for p in iteration_curve(entry, 2, &config, &params, params.n_iters, MseRegion::UnknownOnly)? {
            records.push(EvalRecord {
                image: entry.name.clone(),
                lambda: config.lambda,
                iterations: p.iteration,
                region: MseRegion::UnknownOnly,
                mse: p.mse,
                pimp: Some(p.pimp),
            });
        }
    }
    let out = root.join("results.csv");
    write_results_csv(File::create(&out)?, &records)?;
    println!("wrote {} rows to {}", records.len(), out.display());
    Ok(())
}
