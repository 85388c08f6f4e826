//! Sampling-based data term.
//!
//! Each unknown pixel is explained by pairs of nearby foreground and
//! background boundary colors. The best pairs give an estimated alpha and a
//! confidence, which become edge weights from the pixel to two virtual
//! terminal nodes (foreground with alpha 1, background with alpha 0).

use rayon::prelude::*;

use crate::error::{MattingError, Result};
use crate::imageio::{Image, Label, Rgb, Trimap};

/// Residual ratio reported for a degenerate pair whose colors coincide.
pub const DEGENERATE_RATIO: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingParams {
    /// Boundary samples gathered per class for every unknown pixel.
    pub n_samples: usize,
    /// Number of highest-confidence pairs averaged into the estimate.
    pub top_pairs: usize,
    pub sigma: f64,
    /// Lower bound for the color-similarity weights.
    pub weight_floor: f64,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            n_samples: 10,
            top_pairs: 3,
            sigma: 0.1,
            weight_floor: 0.05,
        }
    }
}

impl SamplingParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(MattingError::InvalidParameter("n_samples must be >= 1".into()));
        }
        if self.top_pairs == 0 {
            return Err(MattingError::InvalidParameter("top_pairs must be >= 1".into()));
        }
        if !(self.sigma > 0.0) {
            return Err(MattingError::InvalidParameter("sigma must be > 0".into()));
        }
        if !(self.weight_floor > 0.0 && self.weight_floor <= 1.0) {
            return Err(MattingError::InvalidParameter(
                "weight_floor must be in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub fg_samples: Vec<(usize, Rgb)>,
    pub bg_samples: Vec<(usize, Rgb)>,
}

/// Foreground and background boundary pixels of a trimap.
#[derive(Debug, Clone)]
pub struct BoundarySamples {
    width: usize,
    fg: Vec<usize>,
    bg: Vec<usize>,
}

impl BoundarySamples {
    /// Falls back to every pixel of a class when none of them touches the unknown region.
    pub fn new(trimap: &Trimap) -> Result<Self> {
        let gather = |label: Label| {
            let all: Vec<usize> = (0..trimap.len())
                .filter(|&i| trimap.label(i) == label)
                .collect();
            let boundary: Vec<usize> = all
                .iter()
                .copied()
                .filter(|&i| trimap.is_boundary(i))
                .collect();
            if boundary.is_empty() {
                all
            } else {
                boundary
            }
        };
        let fg = gather(Label::Foreground);
        let bg = gather(Label::Background);
        if fg.is_empty() {
            return Err(MattingError::NoForegroundSamples);
        }
        if bg.is_empty() {
            return Err(MattingError::NoBackgroundSamples);
        }
        Ok(Self {
            width: trimap.width(),
            fg,
            bg,
        })
    }

    pub fn foreground(&self) -> &[usize] {
        &self.fg
    }

    pub fn background(&self) -> &[usize] {
        &self.bg
    }

    /// The `n` candidates spatially nearest to `z`, closest first; ties go to the lower index.
    fn nearest(&self, candidates: &[usize], z: usize, n: usize) -> Vec<usize> {
        let (zx, zy) = ((z % self.width) as i64, (z / self.width) as i64);
        let mut keyed: Vec<(i64, usize)> = candidates
            .iter()
            .map(|&c| {
                let dx = (c % self.width) as i64 - zx;
                let dy = (c / self.width) as i64 - zy;
                (dx * dx + dy * dy, c)
            })
            .collect();
        if keyed.len() > n {
            keyed.select_nth_unstable(n - 1);
            keyed.truncate(n);
        }
        keyed.sort_unstable();
        keyed.into_iter().map(|(_, c)| c).collect()
    }

    pub fn samples_for(&self, image: &Image, z: usize, n: usize) -> SampleSet {
        let tag = |i: usize| (i, image.pixel(i));
        SampleSet {
            fg_samples: self.nearest(&self.fg, z, n).into_iter().map(tag).collect(),
            bg_samples: self.nearest(&self.bg, z, n).into_iter().map(tag).collect(),
        }
    }
}

/// Gathers the `n_samples` nearest foreground and background boundary pixels of unknown pixel `z`.
pub fn collect_samples(
    trimap: &Trimap,
    image: &Image,
    z: usize,
    n_samples: usize,
) -> Result<SampleSet> {
    trimap.check_dims(image.width(), image.height())?;
    if n_samples == 0 {
        return Err(MattingError::InvalidParameter("n_samples must be >= 1".into()));
    }
    if z >= trimap.len() || trimap.label(z) != Label::Unknown {
        return Err(MattingError::InvalidParameter(format!(
            "pixel {z} is not an unknown pixel"
        )));
    }
    Ok(BoundarySamples::new(trimap)?.samples_for(image, z, n_samples))
}

#[inline]
fn sub(a: Rgb, b: Rgb) -> Rgb {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
fn dot(a: Rgb, b: Rgb) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Projects `i` onto the segment from `b` to `f`, clamped to `[0, 1]`.
pub fn estimate_alpha_pair(i: Rgb, f: Rgb, b: Rgb) -> f64 {
    let fb = sub(f, b);
    let denom = dot(fb, fb);
    if denom < 1e-12 {
        return 0.5;
    }
    (dot(sub(i, b), fb) / denom).clamp(0.0, 1.0)
}

/// Distance from `i` to its reconstruction `alpha*f + (1-alpha)*b`, relative to `|f - b|`.
pub fn pair_distance_ratio(i: Rgb, f: Rgb, b: Rgb, alpha_hat: f64) -> f64 {
    let fb = sub(f, b);
    let fb_norm = dot(fb, fb).sqrt();
    if fb_norm < 1e-6 {
        return DEGENERATE_RATIO;
    }
    let recon = [
        alpha_hat * f[0] + (1.0 - alpha_hat) * b[0],
        alpha_hat * f[1] + (1.0 - alpha_hat) * b[1],
        alpha_hat * f[2] + (1.0 - alpha_hat) * b[2],
    ];
    let r = sub(i, recon);
    dot(r, r).sqrt() / fb_norm
}

pub fn pair_confidence(ratio: f64, w_f: f64, w_b: f64, sigma: f64) -> f64 {
    (-(ratio * ratio) * w_f * w_b / (sigma * sigma)).exp()
}

/// Per-unknown-pixel estimate, indexed in ascending pixel order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DataTermField {
    pub pixels: Vec<usize>,
    pub alpha_hat: Vec<f64>,
    pub confidence: Vec<f64>,
}

impl DataTermField {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

/// Similarity weights `exp(-|c - i|^2 / d^2)` where `d` is the closest sample distance.
fn similarity_weights(i: Rgb, colors: &[Rgb], floor: f64) -> Vec<f64> {
    let d2: Vec<f64> = colors.iter().map(|&c| {
        let d = sub(c, i);
        dot(d, d)
    }).collect();
    let min = d2.iter().copied().fold(f64::INFINITY, f64::min).max(1e-12);
    d2.iter().map(|&d| (-d / min).exp().max(floor)).collect()
}

/// Estimate and confidence for one pixel from its sample set.
pub fn estimate_pixel(i: Rgb, samples: &SampleSet, params: &SamplingParams) -> (f64, f64) {
    let fg: Vec<Rgb> = samples.fg_samples.iter().map(|s| s.1).collect();
    let bg: Vec<Rgb> = samples.bg_samples.iter().map(|s| s.1).collect();
    let wf = similarity_weights(i, &fg, params.weight_floor);
    let wb = similarity_weights(i, &bg, params.weight_floor);

    let mut pairs = Vec::with_capacity(fg.len() * bg.len());
    for (fi, &f) in fg.iter().enumerate() {
        for (bi, &b) in bg.iter().enumerate() {
            let a = estimate_alpha_pair(i, f, b);
            let ratio = pair_distance_ratio(i, f, b, a);
            pairs.push((a, pair_confidence(ratio, wf[fi], wb[bi], params.sigma)));
        }
    }
    // Stable sort keeps enumeration order among equal confidences.
    pairs.sort_by(|x, y| y.1.total_cmp(&x.1));
    pairs.truncate(params.top_pairs);

    let k = pairs.len() as f64;
    let conf_sum: f64 = pairs.iter().map(|p| p.1).sum();
    let alpha = if conf_sum > 0.0 {
        pairs.iter().map(|p| p.0 * p.1).sum::<f64>() / conf_sum
    } else {
        pairs.iter().map(|p| p.0).sum::<f64>() / k
    };
    (alpha.clamp(0.0, 1.0), (conf_sum / k).clamp(0.0, 1.0))
}

pub fn compute_data_term(
    image: &Image,
    trimap: &Trimap,
    params: &SamplingParams,
) -> Result<DataTermField> {
    trimap.check_dims(image.width(), image.height())?;
    params.validate()?;
    let pixels = trimap.unknown_indices();
    if pixels.is_empty() {
        return Ok(DataTermField::default());
    }
    let boundary = BoundarySamples::new(trimap)?;
    let estimates: Vec<(f64, f64)> = pixels
        .par_iter()
        .map(|&z| {
            let samples = boundary.samples_for(image, z, params.n_samples);
            estimate_pixel(image.pixel(z), &samples, params)
        })
        .collect();
    let (alpha_hat, confidence) = estimates.into_iter().unzip();
    Ok(DataTermField {
        pixels,
        alpha_hat,
        confidence,
    })
}

/// Edge weights from every pixel to the foreground and background terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct TerminalWeights {
    pub to_fg: Vec<f64>,
    pub to_bg: Vec<f64>,
}

/// Terminal weights for one unknown pixel; low confidence falls back to the rounded estimate.
pub fn terminal_weights(alpha_hat: f64, confidence: f64, gamma_scale: f64) -> (f64, f64) {
    let hard_fg = if alpha_hat > 0.5 { 1.0 } else { 0.0 };
    let w_f = confidence * alpha_hat + (1.0 - confidence) * hard_fg;
    let w_b = confidence * (1.0 - alpha_hat) + (1.0 - confidence) * (1.0 - hard_fg);
    (gamma_scale * w_f, gamma_scale * w_b)
}

pub fn data_weights(
    field: &DataTermField,
    trimap: &Trimap,
    gamma_scale: f64,
) -> Result<TerminalWeights> {
    if !(gamma_scale > 0.0) {
        return Err(MattingError::InvalidParameter("gamma_scale must be > 0".into()));
    }
    let n = trimap.len();
    let mut to_fg = vec![0.0; n];
    let mut to_bg = vec![0.0; n];
    for (idx, label) in trimap.labels().iter().enumerate() {
        match label {
            Label::Foreground => to_fg[idx] = gamma_scale,
            Label::Background => to_bg[idx] = gamma_scale,
            Label::Unknown => {}
        }
    }
    for ((&z, &a), &f) in field
        .pixels
        .iter()
        .zip(&field.alpha_hat)
        .zip(&field.confidence)
    {
        if trimap.label(z) != Label::Unknown {
            return Err(MattingError::InvalidData(format!(
                "data term covers known pixel {z}"
            )));
        }
        (to_fg[z], to_bg[z]) = terminal_weights(a, f, gamma_scale);
    }
    Ok(TerminalWeights { to_fg, to_bg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imageio::Label::{Background as B, Foreground as F, Unknown as U};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn projection_endpoints() {
        let f = [0.9, 0.2, 0.4];
        let b = [0.1, 0.3, 0.8];
        close(estimate_alpha_pair(f, f, b), 1.0, 1e-15);
        close(estimate_alpha_pair(b, f, b), 0.0, 1e-15);
        let mid = [(f[0] + b[0]) / 2.0, (f[1] + b[1]) / 2.0, (f[2] + b[2]) / 2.0];
        close(estimate_alpha_pair(mid, f, b), 0.5, 1e-15);
        close(estimate_alpha_pair([0.3, 0.1, 0.0], [1.0, 0.0, 0.0], [0.0; 3]), 0.3, 1e-15);
        assert_eq!(estimate_alpha_pair([0.2; 3], [0.4; 3], [0.4; 3]), 0.5);
    }

    #[test]
    fn distance_ratio_cases() {
        let f = [1.0, 0.0, 0.0];
        let b = [0.0, 0.0, 0.0];
        close(pair_distance_ratio([0.25, 0.0, 0.0], f, b, 0.25), 0.0, 1e-15);
        close(pair_distance_ratio([0.5, 0.5, 0.0], f, b, 0.5), 0.5, 1e-15);
        assert_eq!(pair_distance_ratio([0.5; 3], f, f, 0.5), DEGENERATE_RATIO);
    }

    #[test]
    fn confidence_cases() {
        assert_eq!(pair_confidence(0.0, 0.3, 0.7, 0.1), 1.0);
        close(pair_confidence(1.0, 1.0, 1.0, 1.0), (-1.0f64).exp(), 1e-15);
        assert!(pair_confidence(1e3, 1.0, 1.0, 0.1) < 1e-300);
    }

    #[test]
    fn samples_three_pixel_line() {
        let img = Image::from_fn(3, 1, |x, _| [x as f64 / 2.0; 3]);
        let t = Trimap::new(3, 1, vec![F, U, B]).unwrap();
        let s = collect_samples(&t, &img, 1, 1).unwrap();
        assert_eq!(s.fg_samples, vec![(0, [0.0; 3])]);
        assert_eq!(s.bg_samples, vec![(2, [1.0; 3])]);
    }

    #[test]
    fn samples_are_nearest_boundary_pixels() {
        // FG top row, BG bottom row, everything else unknown.
        let t = Trimap::from_fn(5, 5, |_, y| match y {
            0 => F,
            4 => B,
            _ => U,
        });
        let img = Image::from_fn(5, 5, |_, _| [0.5; 3]);
        let s = collect_samples(&t, &img, 12, 2).unwrap();
        // Brute force: rank every boundary pixel by squared distance, then index.
        let brute = |cands: Vec<usize>| {
            let mut v: Vec<(usize, usize)> = cands
                .into_iter()
                .map(|c| {
                    let (dx, dy) = ((c % 5) as i64 - 2, (c / 5) as i64 - 2);
                    ((dx * dx + dy * dy) as usize, c)
                })
                .collect();
            v.sort();
            v.into_iter().take(2).map(|p| p.1).collect::<Vec<_>>()
        };
        let fg: Vec<usize> = s.fg_samples.iter().map(|p| p.0).collect();
        let bg: Vec<usize> = s.bg_samples.iter().map(|p| p.0).collect();
        assert_eq!(fg, brute((0..5).collect()));
        assert_eq!(bg, brute((20..25).collect()));
        assert_eq!(fg, vec![2, 1]);
        assert_eq!(bg, vec![22, 21]);
    }

    #[test]
    fn samples_capped_by_available() {
        let t = Trimap::new(3, 1, vec![F, U, B]).unwrap();
        let img = Image::from_fn(3, 1, |_, _| [0.0; 3]);
        let s = collect_samples(&t, &img, 1, 10).unwrap();
        assert_eq!((s.fg_samples.len(), s.bg_samples.len()), (1, 1));
    }

    #[test]
    fn missing_classes() {
        let img = Image::from_fn(3, 1, |_, _| [0.0; 3]);
        let t = Trimap::new(3, 1, vec![U, U, B]).unwrap();
        assert!(matches!(
            collect_samples(&t, &img, 0, 1),
            Err(MattingError::NoForegroundSamples)
        ));
        let t = Trimap::new(3, 1, vec![F, U, U]).unwrap();
        assert!(matches!(
            compute_data_term(&img, &t, &SamplingParams::default()),
            Err(MattingError::NoBackgroundSamples)
        ));
    }

    #[test]
    fn midpoint_pixel_gets_half_alpha() {
        let colors = [[1.0, 0.0, 0.0], [0.5, 0.0, 0.5], [0.0, 0.0, 1.0]];
        let img = Image::from_fn(3, 1, |x, _| colors[x]);
        let t = Trimap::new(3, 1, vec![F, U, B]).unwrap();
        let field = compute_data_term(&img, &t, &SamplingParams::default()).unwrap();
        assert_eq!(field.pixels, vec![1]);
        close(field.alpha_hat[0], 0.5, 1e-15);
        close(field.confidence[0], 1.0, 1e-15);
    }

    #[test]
    fn exact_foreground_color() {
        let fg = [0.8, 0.6, 0.1];
        let img = Image::from_fn(4, 1, |x, _| if x < 2 { fg } else { [0.0, 0.1, 0.9] });
        let t = Trimap::new(4, 1, vec![F, U, U, B]).unwrap();
        let field = compute_data_term(&img, &t, &SamplingParams::default()).unwrap();
        close(field.alpha_hat[0], 1.0, 1e-15);
        close(field.confidence[0], 1.0, 1e-12);
    }

    #[test]
    fn no_unknowns_gives_empty_field() {
        let img = Image::from_fn(2, 1, |_, _| [0.0; 3]);
        let t = Trimap::new(2, 1, vec![F, B]).unwrap();
        let field = compute_data_term(&img, &t, &SamplingParams::default()).unwrap();
        assert!(field.is_empty());
    }

    #[test]
    fn weight_formula() {
        let (wf, wb) = terminal_weights(0.7, 1.0, 1.0);
        close(wf, 0.7, 1e-15);
        close(wb, 0.3, 1e-15);
        assert_eq!(terminal_weights(0.7, 0.0, 1.0), (1.0, 0.0));
        assert_eq!(terminal_weights(0.5, 0.0, 1.0), (0.0, 1.0));
    }

    #[test]
    fn weights_for_known_pixels() {
        let t = Trimap::new(3, 1, vec![F, U, B]).unwrap();
        let field = DataTermField {
            pixels: vec![1],
            alpha_hat: vec![0.25],
            confidence: vec![0.5],
        };
        let w = data_weights(&field, &t, 2.0).unwrap();
        assert_eq!(w.to_fg[0], 2.0);
        assert_eq!(w.to_bg[0], 0.0);
        assert_eq!(w.to_fg[2], 0.0);
        assert_eq!(w.to_bg[2], 2.0);
        close(w.to_fg[1] + w.to_bg[1], 2.0, 1e-15);
        assert!(data_weights(&field, &t, 0.0).is_err());
    }
}
