//! Semi-supervised trimap refinement.
//!
//! After each matting pass a few unknown pixels are promoted to known labels.
//! A pixel is promoted only when it passes three gates together, all judged
//! against the same pre-refinement trimap and matte:
//!
//! * space: it touches a known pixel through a 4-connected neighbour;
//! * confidence: its alpha is above `t_alpha` (foreground) or below
//!   `1 - t_alpha` (background);
//! * proportion: it ranks in the top `t_percent` of unknown pixels by `|0.5 - alpha|`.

use std::io::Write;

use crate::error::{MattingError, Result};
use crate::eval::{mse, MseRegion};
use crate::imageio::{AlphaMatte, Image, Label, Trimap};
use crate::pipeline::{MattingConfig, Matter};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefinementParams {
    pub t_alpha: f64,
    pub t_percent: f64,
    pub n_iters: usize,
}

impl Default for RefinementParams {
    fn default() -> Self {
        Self {
            t_alpha: 0.95,
            t_percent: 0.10,
            n_iters: 4,
        }
    }
}

impl RefinementParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_alpha > 0.5 && self.t_alpha < 1.0) {
            return Err(MattingError::InvalidParameter(format!(
                "t_alpha {} must lie in (0.5, 1)",
                self.t_alpha
            )));
        }
        if !(self.t_percent > 0.0 && self.t_percent <= 1.0) {
            return Err(MattingError::InvalidParameter(format!(
                "t_percent {} must lie in (0, 1]",
                self.t_percent
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Promotion {
    Foreground,
    Background,
    None,
}

impl Promotion {
    pub fn label(self) -> Option<Label> {
        match self {
            Promotion::Foreground => Some(Label::Foreground),
            Promotion::Background => Some(Label::Background),
            Promotion::None => None,
        }
    }
}

pub fn space_constraint(trimap: &Trimap, x: usize) -> bool {
    trimap.label(x) == Label::Unknown && trimap.neighbors4(x).any(|n| trimap.label(n).is_known())
}

pub fn confidence_constraint(alpha: f64, t_alpha: f64) -> Promotion {
    if alpha > t_alpha {
        Promotion::Foreground
    } else if alpha < 1.0 - t_alpha {
        Promotion::Background
    } else {
        Promotion::None
    }
}

/// Size of the proportion-gate rank set for `unknown` pixels.
pub fn proportion_cap(unknown: usize, t_percent: f64) -> usize {
    ((t_percent * unknown as f64).ceil() as usize).min(unknown)
}

/// The top `ceil(t_percent * |U|)` unknown pixels by `|0.5 - alpha|`, ties to the lower index.
///
/// Returned in rank order.
pub fn proportion_select(trimap: &Trimap, matte: &AlphaMatte, t_percent: f64) -> Vec<usize> {
    let mut unknown = trimap.unknown_indices();
    let cap = proportion_cap(unknown.len(), t_percent);
    let key = |i: usize| (0.5 - matte.get(i)).abs();
    unknown.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    unknown.truncate(cap);
    unknown
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub trimap: Trimap,
    /// Promoted pixels with their new labels, in ascending pixel order.
    pub promoted: Vec<(usize, Label)>,
}

impl Refinement {
    pub fn count(&self) -> usize {
        self.promoted.len()
    }

    pub fn count_label(&self, label: Label) -> usize {
        self.promoted.iter().filter(|p| p.1 == label).count()
    }
}

pub fn refine_trimap(
    trimap: &Trimap,
    matte: &AlphaMatte,
    params: &RefinementParams,
) -> Result<Refinement> {
    trimap.check_dims(matte.width(), matte.height())?;
    params.validate()?;
    let mut ranked = proportion_select(trimap, matte, params.t_percent);
    ranked.sort_unstable();
    let mut promoted = Vec::new();
    for x in ranked {
        if !space_constraint(trimap, x) {
            continue;
        }
        if let Some(label) = confidence_constraint(matte.get(x), params.t_alpha).label() {
            promoted.push((x, label));
        }
    }
    let mut next = trimap.clone();
    for &(x, label) in &promoted {
        next.set_label(x, label);
    }
    Ok(Refinement {
        trimap: next,
        promoted,
    })
}

/// One row of the refinement trace. Row 0 is the initial solve on the input trimap.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub unknown_before: usize,
    pub unknown_after: usize,
    pub promoted_fg: usize,
    pub promoted_bg: usize,
    /// Matte error after this iteration's solve, when ground truth was given.
    pub mse: Option<f64>,
    pub cg_iterations: usize,
    pub cg_residual: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RefinementTrace {
    pub records: Vec<IterationRecord>,
}

impl RefinementTrace {
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub const CSV_HEADER: [&'static str; 9] = [
        "iteration",
        "unknown_before",
        "unknown_after",
        "promoted_fg",
        "promoted_bg",
        "mse",
        "cg_iterations",
        "cg_residual",
        "converged",
    ];

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.iteration.to_string(),
                r.unknown_before.to_string(),
                r.unknown_after.to_string(),
                r.promoted_fg.to_string(),
                r.promoted_bg.to_string(),
                r.mse.map(|m| m.to_string()).unwrap_or_default(),
                r.cg_iterations.to_string(),
                r.cg_residual.to_string(),
                r.converged.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Ground truth used to score each iteration.
#[derive(Debug, Clone, Copy)]
pub struct Scoring<'a> {
    pub truth: &'a AlphaMatte,
    pub region: MseRegion,
}

/// What an observer sees after each refinement step.
#[derive(Debug)]
pub struct StepView<'a> {
    pub iteration: usize,
    pub trimap_before: &'a Trimap,
    pub matte_before: &'a AlphaMatte,
    pub refinement: &'a Refinement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineResult {
    pub matte: AlphaMatte,
    pub trimap: Trimap,
    pub trace: RefinementTrace,
}

pub fn run_pipeline(
    image: &Image,
    trimap: &Trimap,
    config: &MattingConfig,
    params: &RefinementParams,
) -> Result<PipelineResult> {
    run_pipeline_with(image, trimap, config, params, None, |_| {})
}

/// Solves, then repeats `{refine trimap, re-solve}` up to `n_iters` times.
///
/// Stops early when a refinement promotes nothing or no unknown pixel is
/// left. MSE is always measured on the input trimap's regions so that
/// iterations stay comparable.
pub fn run_pipeline_with(
    image: &Image,
    trimap: &Trimap,
    config: &MattingConfig,
    params: &RefinementParams,
    scoring: Option<Scoring<'_>>,
    mut observer: impl FnMut(&StepView<'_>),
) -> Result<PipelineResult> {
    params.validate()?;
    trimap.check_dims(image.width(), image.height())?;
    trimap.require_known()?;
    let initial_unknown = trimap.count(Label::Unknown);
    if initial_unknown == 0 {
        return Ok(PipelineResult {
            matte: AlphaMatte::from_trimap(trimap),
            trimap: trimap.clone(),
            trace: RefinementTrace::default(),
        });
    }
    let score = |m: &AlphaMatte| -> Result<Option<f64>> {
        scoring
            .map(|s| mse(m, s.truth, s.region, trimap))
            .transpose()
    };

    let matter = Matter::new(image, *config)?;
    let first = matter.solve(trimap)?;
    let mut trace = RefinementTrace::default();
    trace.records.push(IterationRecord {
        iteration: 0,
        unknown_before: initial_unknown,
        unknown_after: initial_unknown,
        promoted_fg: 0,
        promoted_bg: 0,
        mse: score(&first.matte)?,
        cg_iterations: first.iterations,
        cg_residual: first.residual,
        converged: first.converged,
    });
    let mut current = trimap.clone();
    let mut matte = first.matte;

    for iteration in 1..=params.n_iters {
        let unknown_before = current.count(Label::Unknown);
        if unknown_before == 0 {
            break;
        }
        let refinement = refine_trimap(&current, &matte, params)?;
        observer(&StepView {
            iteration,
            trimap_before: &current,
            matte_before: &matte,
            refinement: &refinement,
        });
        if refinement.count() == 0 {
            break;
        }
        let outcome = matter.solve(&refinement.trimap)?;
        trace.records.push(IterationRecord {
            iteration,
            unknown_before,
            unknown_after: unknown_before - refinement.count(),
            promoted_fg: refinement.count_label(Label::Foreground),
            promoted_bg: refinement.count_label(Label::Background),
            mse: score(&outcome.matte)?,
            cg_iterations: outcome.iterations,
            cg_residual: outcome.residual,
            converged: outcome.converged,
        });
        current = refinement.trimap;
        matte = outcome.matte;
    }
    Ok(PipelineResult {
        matte,
        trimap: current,
        trace,
    })
}
