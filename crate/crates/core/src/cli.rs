//! Command-line front end: `matte`, `sweep` and `eval` subcommands.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dataterm::SamplingParams;
use crate::error::{MattingError, Result};
use crate::eval::{
    ingest_benchmark, iteration_curve, lambda_sweep, write_results_csv, EvalRecord, MseRegion,
};
use crate::imageio::{load_alpha, load_image, load_trimap, save_alpha};
use crate::pipeline::MattingConfig;
use crate::solver::{CgParams, DEFAULT_LAMBDA};
use crate::ssl::{run_pipeline_with, RefinementParams, Scoring};

pub const DEFAULT_SWEEP: [f64; 7] = [1e-4, 1e-3, 1e-2, 5e-2, 0.1, 0.5, 1.0];

#[derive(Debug, Parser)]
#[command(name = "nwmatte", version, about = "Alpha matting with normalized weight and trimap self-refinement")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Matte one image and write the alpha PNG.
    Matte(MatteArgs),
    /// Lambda sweep over a benchmark directory (no refinement).
    Sweep(SweepArgs),
    /// MSE and PIMP per refinement iteration over a benchmark directory.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Number of foreground and of background samples per unknown pixel.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    /// Best sample pairs averaged per pixel.
    #[arg(long = "top-pairs", default_value_t = 3)]
    pub top_pairs: usize,
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    /// Covariance regularizer of the matting Laplacian.
    #[arg(long = "lap-eps", default_value_t = 1e-5)]
    pub lap_eps: f64,
    #[arg(long = "cg-tol", default_value_t = 1e-7)]
    pub cg_tol: f64,
    #[arg(long = "cg-max-iter", default_value_t = 2000)]
    pub cg_max_iter: usize,
    /// Region for MSE: "unknown" (input trimap's unknown pixels) or "whole".
    #[arg(long = "mse-region", default_value = "unknown")]
    pub mse_region: String,
}

#[derive(Debug, Clone, Args)]
pub struct RefineArgs {
    /// Refinement iterations after the initial solve.
    #[arg(long, default_value_t = 4)]
    pub iters: usize,
    #[arg(long = "t-alpha", default_value_t = 0.95)]
    pub t_alpha: f64,
    #[arg(long = "t-percent", default_value_t = 0.10)]
    pub t_percent: f64,
}

#[derive(Debug, Args)]
pub struct MatteArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub trimap: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    /// Trace CSV path; defaults to the output path with a `.trace.csv` suffix.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Optional ground-truth alpha for per-iteration MSE in the trace.
    #[arg(long)]
    pub gt: Option<PathBuf>,
    #[command(flatten)]
    pub refine: RefineArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Benchmark root with input/, trimap1/, trimap2/ and gt/.
    #[arg(long)]
    pub root: PathBuf,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub level: u8,
    /// Comma-separated lambda grid.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SWEEP)]
    pub lambdas: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub root: PathBuf,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub level: u8,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub refine: RefineArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
}

impl SolverArgs {
    pub fn config(&self, lambda: f64) -> Result<MattingConfig> {
        let config = MattingConfig {
            lambda,
            sampling: SamplingParams {
                n_samples: self.samples,
                top_pairs: self.top_pairs,
                sigma: self.sigma,
                ..SamplingParams::default()
            },
            laplacian_eps: self.lap_eps,
            cg: CgParams {
                tol: self.cg_tol,
                max_iter: self.cg_max_iter,
            },
        };
        config.validate()?;
        Ok(config)
    }

    pub fn region(&self) -> Result<MseRegion> {
        self.mse_region.parse()
    }
}

impl RefineArgs {
    pub fn params(&self) -> Result<RefinementParams> {
        let p = RefinementParams {
            t_alpha: self.t_alpha,
            t_percent: self.t_percent,
            n_iters: self.iters,
        };
        p.validate()?;
        Ok(p)
    }
}

/// `alpha.png` becomes `alpha.trace.csv`.
pub fn default_trace_path(output: &Path) -> PathBuf {
    output.with_extension("trace.csv")
}

pub fn cmd_matte(args: &MatteArgs) -> Result<()> {
    let config = args.solver.config(args.lambda)?;
    let params = args.refine.params()?;
    let region = args.solver.region()?;
    let image = load_image(&args.input)?;
    let trimap = load_trimap(&args.trimap)?;
    trimap.check_dims(image.width(), image.height())?;
    let truth = args.gt.as_ref().map(load_alpha).transpose()?;
    let scoring = truth.as_ref().map(|t| Scoring { truth: t, region });
    let result = run_pipeline_with(&image, &trimap, &config, &params, scoring, |_| {})?;
    save_alpha(&args.output, &result.matte)?;
    if params.n_iters > 0 {
        let path = args
            .trace
            .clone()
            .unwrap_or_else(|| default_trace_path(&args.output));
        result.trace.write_csv(BufWriter::new(File::create(path)?))?;
    }
    Ok(())
}

fn write_csv(path: &Path, records: &[EvalRecord]) -> Result<()> {
    write_results_csv(BufWriter::new(File::create(path)?), records)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let config = args.solver.config(DEFAULT_LAMBDA)?;
    let region = args.solver.region()?;
    let set = ingest_benchmark(&args.root)?;
    let mut records = Vec::new();
    for entry in &set.entries {
        records.extend(lambda_sweep(entry, &args.lambdas, args.level, &config, region)?);
    }
    write_csv(&args.out, &records)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let config = args.solver.config(args.lambda)?;
    let params = args.refine.params()?;
    let region = args.solver.region()?;
    let set = ingest_benchmark(&args.root)?;
    if let Some(e) = set.entries.iter().find(|e| e.ground_truth.is_none()) {
        return Err(MattingError::MissingGroundTruth(e.name.clone()));
    }
    let mut records = Vec::new();
    for entry in &set.entries {
        let curve = iteration_curve(entry, args.level, &config, &params, params.n_iters, region)?;
        records.extend(curve.into_iter().map(|p| EvalRecord {
            image: entry.name.clone(),
            lambda: args.lambda,
            iterations: p.iteration,
            region,
            mse: p.mse,
            pimp: Some(p.pimp),
        }));
    }
    write_csv(&args.out, &records)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Matte(a) => cmd_matte(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Eval(a) => cmd_eval(a),
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
