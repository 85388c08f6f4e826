//! MSE against lambda on a few synthetic composites.

use nwmatte::eval::{sweep_lambdas, LoadedEntry};
use nwmatte::synth::suite;
use nwmatte::{cli::DEFAULT_SWEEP, MattingConfig, MseRegion};

fn main() -> nwmatte::Result<()> {
    print!("{:>8}", "image");
    for l in DEFAULT_SWEEP {
        print!("{l:>10}");
    }
    println!();
    for (i, c) in suite(48, 48, 6, 8.0).into_iter().enumerate() {
        let entry = LoadedEntry { name: format!("syn{i}"), image: c.image, trimap: c.trimap, truth: c.truth };
        let records = sweep_lambdas(&entry, &DEFAULT_SWEEP, &MattingConfig::default(), MseRegion::UnknownOnly)?;
        print!("{:>8}", entry.name);
        for r in records {
            print!("{:>10.2e}", r.mse);
        }
        println!();
    }
    Ok(())
}
