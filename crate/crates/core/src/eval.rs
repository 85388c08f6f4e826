//! Matte quality measurement and benchmark drivers.
//!
//! A benchmark root is laid out as
//!
//! ```text
//! root/input/<name>.png     RGB image
//! root/trimap1/<name>.png   coarse level 1 trimap
//! root/trimap2/<name>.png   coarse level 2 trimap
//! root/gt/<name>.png        ground-truth alpha (optional)
//! ```

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{MattingError, Result};
use crate::imageio::{load_alpha, load_image, load_trimap, AlphaMatte, Image, Label, Trimap};
use crate::pipeline::{MattingConfig, Matter};
use crate::ssl::{run_pipeline_with, RefinementParams, Scoring};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MseRegion {
    /// Pixels that are unknown in the reference trimap.
    #[default]
    UnknownOnly,
    WholeImage,
}

impl fmt::Display for MseRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MseRegion::UnknownOnly => "unknown",
            MseRegion::WholeImage => "whole",
        })
    }
}

impl FromStr for MseRegion {
    type Err = MattingError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unknown" => Ok(MseRegion::UnknownOnly),
            "whole" => Ok(MseRegion::WholeImage),
            other => Err(MattingError::InvalidParameter(format!(
                "unknown MSE region {other:?} (expected \"unknown\" or \"whole\")"
            ))),
        }
    }
}

/// Mean squared alpha error over `region`, where the unknown region comes from `trimap`.
pub fn mse(matte: &AlphaMatte, truth: &AlphaMatte, region: MseRegion, trimap: &Trimap) -> Result<f64> {
    let dims = (truth.width(), truth.height());
    for found in [(matte.width(), matte.height()), (trimap.width(), trimap.height())] {
        if found != dims {
            return Err(MattingError::DimensionMismatch {
                expected: dims,
                found,
            });
        }
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for i in 0..truth.len() {
        if region == MseRegion::UnknownOnly && trimap.label(i) != Label::Unknown {
            continue;
        }
        let d = matte.get(i) - truth.get(i);
        sum += d * d;
        count += 1;
    }
    if count == 0 {
        return Err(MattingError::EmptyRegion);
    }
    Ok(sum / count as f64)
}

/// Relative improvement `1 - with / without`, floored at zero.
pub fn pimp(mse_with_ssl: f64, mse_without_ssl: f64) -> Result<f64> {
    if mse_without_ssl == 0.0 {
        return Err(MattingError::ZeroBaseline);
    }
    if !(mse_without_ssl > 0.0) || !(mse_with_ssl >= 0.0) {
        return Err(MattingError::InvalidParameter(format!(
            "MSE values must be non-negative, got {mse_with_ssl} and {mse_without_ssl}"
        )));
    }
    let v = 1.0 - mse_with_ssl / mse_without_ssl;
    Ok(if v > 0.0 { v } else { 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub image: String,
    pub lambda: f64,
    pub iterations: usize,
    pub region: MseRegion,
    pub mse: f64,
    pub pimp: Option<f64>,
}

pub const RESULTS_HEADER: [&str; 6] = ["image", "lambda", "iters", "region", "mse", "pimp"];

/// Writes records as `image,lambda,iters,region,mse,pimp`; a missing PIMP is an empty field.
pub fn write_results_csv<W: Write>(out: W, records: &[EvalRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for r in records {
        w.write_record([
            r.image.clone(),
            r.lambda.to_string(),
            r.iterations.to_string(),
            r.region.to_string(),
            r.mse.to_string(),
            r.pimp.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchmarkEntry {
    pub name: String,
    pub image: PathBuf,
    /// Trimap paths for coarse levels 1 and 2.
    pub trimaps: [Option<PathBuf>; 2],
    pub ground_truth: Option<PathBuf>,
}

impl BenchmarkEntry {
    pub fn trimap_path(&self, level: u8) -> Result<&Path> {
        let missing = || MattingError::MissingTrimap {
            name: self.name.clone(),
            level,
        };
        match level {
            1 | 2 => self.trimaps[level as usize - 1].as_deref().ok_or_else(missing),
            _ => Err(MattingError::InvalidParameter(format!(
                "coarse level must be 1 or 2, got {level}"
            ))),
        }
    }

    /// Loads image, trimap and ground truth; fails if the ground truth is absent.
    pub fn load(&self, level: u8) -> Result<LoadedEntry> {
        let gt = self
            .ground_truth
            .as_ref()
            .ok_or_else(|| MattingError::MissingGroundTruth(self.name.clone()))?;
        let image = load_image(&self.image)?;
        let trimap = load_trimap(self.trimap_path(level)?)?;
        trimap.check_dims(image.width(), image.height())?;
        let truth = load_alpha(gt)?;
        trimap.check_dims(truth.width(), truth.height())?;
        Ok(LoadedEntry {
            name: self.name.clone(),
            image,
            trimap,
            truth,
        })
    }
}

/// An image with trimap and ground truth in memory.
#[derive(Debug, Clone)]
pub struct LoadedEntry {
    pub name: String,
    pub image: Image,
    pub trimap: Trimap,
    pub truth: AlphaMatte,
}

#[derive(Debug, Clone, Default)]
pub struct BenchmarkSet {
    pub entries: Vec<BenchmarkEntry>,
    pub warnings: Vec<String>,
}

fn png_stems(dir: &Path) -> Result<Vec<(String, PathBuf)>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if !is_png {
            continue;
        }
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            out.push((stem.to_owned(), path));
        }
    }
    out.sort();
    Ok(out)
}

/// Matches `input/`, `trimap1/`, `trimap2/` and `gt/` files by stem.
///
/// Images with no trimap at either level are skipped with a warning; a
/// missing single level is also reported.
pub fn ingest_benchmark(root: impl AsRef<Path>) -> Result<BenchmarkSet> {
    let root = root.as_ref();
    let find = |sub: &str, name: &str| {
        let p = root.join(sub).join(format!("{name}.png"));
        p.is_file().then_some(p)
    };
    let mut set = BenchmarkSet::default();
    for (name, image) in png_stems(&root.join("input"))? {
        let trimaps = [find("trimap1", &name), find("trimap2", &name)];
        if trimaps.iter().all(Option::is_none) {
            let msg = format!("{name}: no trimap at any coarse level, skipped");
            log::warn!("{msg}");
            set.warnings.push(msg);
            continue;
        }
        for (level, t) in trimaps.iter().enumerate() {
            if t.is_none() {
                let msg = format!("{name}: no coarse level {} trimap", level + 1);
                log::warn!("{msg}");
                set.warnings.push(msg);
            }
        }
        set.entries.push(BenchmarkEntry {
            ground_truth: find("gt", &name),
            name,
            image,
            trimaps,
        });
    }
    if set.entries.is_empty() {
        return Err(MattingError::EmptyDataset(root.to_path_buf()));
    }
    Ok(set)
}

/// One matting run per lambda without refinement, in input order.
pub fn sweep_lambdas(
    entry: &LoadedEntry,
    lambdas: &[f64],
    config: &MattingConfig,
    region: MseRegion,
) -> Result<Vec<EvalRecord>> {
    if lambdas.is_empty() {
        return Ok(Vec::new());
    }
    if let Some(&bad) = lambdas.iter().find(|l| !(0.0..=1.0).contains(*l)) {
        return Err(MattingError::BadLambda(bad));
    }
    let matter = Matter::new(&entry.image, *config)?;
    lambdas
        .par_iter()
        .map(|&lambda| {
            let outcome = matter.solve_with_lambda(&entry.trimap, lambda)?;
            Ok(EvalRecord {
                image: entry.name.clone(),
                lambda,
                iterations: 0,
                region,
                mse: mse(&outcome.matte, &entry.truth, region, &entry.trimap)?,
                pimp: None,
            })
        })
        .collect()
}

pub fn lambda_sweep(
    entry: &BenchmarkEntry,
    lambdas: &[f64],
    coarse_level: u8,
    config: &MattingConfig,
    region: MseRegion,
) -> Result<Vec<EvalRecord>> {
    if entry.ground_truth.is_none() {
        return Err(MattingError::MissingGroundTruth(entry.name.clone()));
    }
    if lambdas.is_empty() {
        return Ok(Vec::new());
    }
    sweep_lambdas(&entry.load(coarse_level)?, lambdas, config, region)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub iteration: usize,
    pub mse: f64,
    pub pimp: f64,
}

/// MSE and PIMP after `0..=max_iters` refinement iterations.
///
/// If refinement stops early the matte no longer changes, so the last MSE
/// carries forward to the remaining rows.
pub fn curve_for(
    entry: &LoadedEntry,
    config: &MattingConfig,
    params: &RefinementParams,
    max_iters: usize,
    region: MseRegion,
) -> Result<Vec<CurvePoint>> {
    let params = RefinementParams {
        n_iters: max_iters,
        ..*params
    };
    let scoring = Scoring {
        truth: &entry.truth,
        region,
    };
    let result = run_pipeline_with(&entry.image, &entry.trimap, config, &params, Some(scoring), |_| {})?;
    let mut errors: Vec<f64> = result.trace.records.iter().filter_map(|r| r.mse).collect();
    if errors.is_empty() {
        // No unknown pixels: the matte is the trimap itself.
        errors.push(mse(&result.matte, &entry.truth, region, &entry.trimap)?);
    }
    let baseline = errors[0];
    (0..=max_iters)
        .map(|k| {
            let m = errors[k.min(errors.len() - 1)];
            let p = if k == 0 { 0.0 } else { pimp(m, baseline)? };
            Ok(CurvePoint {
                iteration: k,
                mse: m,
                pimp: p,
            })
        })
        .collect()
}

pub fn iteration_curve(
    entry: &BenchmarkEntry,
    coarse_level: u8,
    config: &MattingConfig,
    params: &RefinementParams,
    max_iters: usize,
    region: MseRegion,
) -> Result<Vec<CurvePoint>> {
    if entry.ground_truth.is_none() {
        return Err(MattingError::MissingGroundTruth(entry.name.clone()));
    }
    curve_for(&entry.load(coarse_level)?, config, params, max_iters, region)
}
