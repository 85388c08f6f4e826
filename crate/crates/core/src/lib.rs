//! Natural-image alpha matting.
//!
//! A sampling-based data term and a matting-Laplacian smoothness term are
//! blended through one normalized weight, `L = lambda * W + (1 - lambda) * L_lap`,
//! and the unknown alphas are found by conjugate gradient. An optional loop
//! then promotes confident unknown pixels into the trimap and solves again.
//!
//! ```no_run
//! use nwmatte::{load_image, load_trimap, save_alpha, run_pipeline, MattingConfig, RefinementParams};
//!
//! let image = load_image("input.png")?;
//! let trimap = load_trimap("trimap.png")?;
//! let result = run_pipeline(&image, &trimap, &MattingConfig::default(), &RefinementParams::default())?;
//! save_alpha("alpha.png", &result.matte)?;
//! # Ok::<(), nwmatte::MattingError>(())
//! ```

pub mod cli;
pub mod dataterm;
pub mod error;
pub mod eval;
pub mod imageio;
pub mod pipeline;
pub mod smoothterm;
pub mod solver;
pub mod sparse;
pub mod ssl;
pub mod synth;

pub use dataterm::{compute_data_term, DataTermField, SamplingParams};
pub use error::{MattingError, Result};
pub use eval::{mse, pimp, MseRegion};
pub use imageio::{
    load_alpha, load_image, load_trimap, save_alpha, save_image, save_trimap, AlphaMatte, Image,
    Label, Rgb, Trimap,
};
pub use pipeline::{matte, MatteOutcome, Matter, MattingConfig};
pub use smoothterm::matting_laplacian;
pub use solver::{CgParams, DEFAULT_LAMBDA};
pub use sparse::SparseSymMatrix;
pub use ssl::{run_pipeline, run_pipeline_with, PipelineResult, RefinementParams};
