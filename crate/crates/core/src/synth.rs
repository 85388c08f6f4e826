//! Synthetic composites with exact ground truth.
//!
//! An alpha profile is laid across a boundary curve, foreground and
//! background colors are mixed with the compositing equation
//! `I = alpha * F + (1 - alpha) * B`, optional Gaussian noise is added, and a
//! trimap marks a band of fixed width around the boundary as unknown.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::imageio::{AlphaMatte, Image, Label, Rgb, Trimap};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColorField {
    Constant(Rgb),
    /// Linear blend from `from` at the left edge to `to` at the right edge.
    HorizontalGradient { from: Rgb, to: Rgb },
    /// `base` plus one oriented sinusoid per channel; `phase` picks the orientations.
    Texture {
        base: Rgb,
        amplitude: f64,
        period: f64,
        phase: f64,
    },
}

impl ColorField {
    fn at(&self, x: f64, y: f64, width: f64) -> Rgb {
        match *self {
            ColorField::Texture {
                base,
                amplitude,
                period,
                phase,
            } => {
                let mut c = base;
                for (k, v) in c.iter_mut().enumerate() {
                    let theta = phase + k as f64 * 2.1;
                    let u = x * theta.cos() + y * theta.sin();
                    *v += amplitude * (std::f64::consts::TAU * u / period + phase * (k + 1) as f64).sin();
                }
                c
            }
            ColorField::Constant(c) => c,
            ColorField::HorizontalGradient { from, to } => {
                let t = if width > 1.0 { x / (width - 1.0) } else { 0.0 };
                [
                    from[0] + t * (to[0] - from[0]),
                    from[1] + t * (to[1] - from[1]),
                    from[2] + t * (to[2] - from[2]),
                ]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// Straight edge through the image centre; foreground lies on the side
    /// the unit normal `(cos angle, sin angle)` points to.
    Line { angle: f64 },
    /// Disc of the given radius centred in the image; foreground inside.
    Circle { radius: f64 },
}

impl Boundary {
    /// Signed distance to the boundary, positive on the foreground side.
    pub fn signed_distance(&self, x: f64, y: f64, width: usize, height: usize) -> f64 {
        let cx = (width as f64 - 1.0) / 2.0;
        let cy = (height as f64 - 1.0) / 2.0;
        match *self {
            Boundary::Line { angle } => (x - cx) * angle.cos() + (y - cy) * angle.sin(),
            Boundary::Circle { radius } => radius - ((x - cx).powi(2) + (y - cy).powi(2)).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub width: usize,
    pub height: usize,
    pub foreground: ColorField,
    pub background: ColorField,
    pub boundary: Boundary,
    /// Distance over which alpha rises linearly from 0 to 1.
    pub ramp_width: f64,
    /// Full width of the unknown band centred on the boundary.
    pub band_width: f64,
    /// Standard deviation of additive per-channel noise.
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            foreground: ColorField::Constant([0.9, 0.8, 0.2]),
            background: ColorField::Constant([0.1, 0.2, 0.7]),
            boundary: Boundary::Line { angle: 0.0 },
            ramp_width: 4.0,
            band_width: 6.0,
            noise: 0.0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticComposite {
    pub image: Image,
    pub truth: AlphaMatte,
    pub trimap: Trimap,
    pub spec: SyntheticSpec,
}

impl SyntheticComposite {
    /// The same composite with its unknown band set to `band_width`.
    pub fn with_band(&self, band_width: f64) -> Trimap {
        band_trimap(&self.spec, band_width)
    }
}

fn band_trimap(spec: &SyntheticSpec, band_width: f64) -> Trimap {
    let half = band_width / 2.0;
    Trimap::from_fn(spec.width, spec.height, |x, y| {
        let s = spec
            .boundary
            .signed_distance(x as f64, y as f64, spec.width, spec.height);
        if s > half {
            Label::Foreground
        } else if s < -half {
            Label::Background
        } else {
            Label::Unknown
        }
    })
}

pub fn alpha_at(spec: &SyntheticSpec, x: usize, y: usize) -> f64 {
    let s = spec
        .boundary
        .signed_distance(x as f64, y as f64, spec.width, spec.height);
    (0.5 + s / spec.ramp_width).clamp(0.0, 1.0)
}

pub fn generate(spec: &SyntheticSpec) -> SyntheticComposite {
    let truth = AlphaMatte::from_fn(spec.width, spec.height, |x, y| alpha_at(spec, x, y));
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, spec.noise.max(0.0)).expect("finite noise level");
    let w = spec.width as f64;
    let image = Image::from_fn(spec.width, spec.height, |x, y| {
        let a = truth.get(y * spec.width + x);
        let f = spec.foreground.at(x as f64, y as f64, w);
        let b = spec.background.at(x as f64, y as f64, w);
        let mut c = [0.0; 3];
        for k in 0..3 {
            c[k] = a * f[k] + (1.0 - a) * b[k];
            if spec.noise > 0.0 {
                c[k] += normal.sample(&mut rng);
            }
        }
        c
    });
    SyntheticComposite {
        trimap: band_trimap(spec, spec.band_width),
        image,
        truth,
        spec: *spec,
    }
}

/// A deterministic family of composites of one size: varied colors,
/// boundary shapes, gradients and noise levels.
pub fn suite(width: usize, height: usize, count: usize, band_width: f64) -> Vec<SyntheticComposite> {
    const PALETTE: [(Rgb, Rgb); 6] = [
        ([0.9, 0.8, 0.2], [0.1, 0.2, 0.7]),
        ([0.95, 0.95, 0.95], [0.05, 0.05, 0.05]),
        ([0.8, 0.2, 0.2], [0.2, 0.7, 0.3]),
        ([0.6, 0.4, 0.8], [0.3, 0.3, 0.2]),
        ([0.2, 0.9, 0.9], [0.7, 0.3, 0.1]),
        ([0.7, 0.7, 0.3], [0.2, 0.3, 0.5]),
    ];
    const NOISE: [f64; 4] = [0.0, 0.01, 0.02, 0.04];
    let min_side = width.min(height) as f64;
    (0..count)
        .map(|i| {
            let (fg, bg) = PALETTE[i % PALETTE.len()];
            let boundary = if i % 2 == 0 {
                Boundary::Line {
                    angle: 0.3 + 0.7 * i as f64,
                }
            } else {
                Boundary::Circle {
                    radius: min_side * (0.25 + 0.03 * (i % 4) as f64),
                }
            };
            let (foreground, background) = if i % 3 == 2 {
                let shade = |c: Rgb, d: f64| c.map(|v| (v + d).clamp(0.0, 1.0));
                (
                    ColorField::HorizontalGradient {
                        from: shade(fg, -0.1),
                        to: shade(fg, 0.1),
                    },
                    ColorField::HorizontalGradient {
                        from: shade(bg, 0.1),
                        to: shade(bg, -0.1),
                    },
                )
            } else {
                (ColorField::Constant(fg), ColorField::Constant(bg))
            };
            generate(&SyntheticSpec {
                width,
                height,
                foreground,
                background,
                boundary,
                ramp_width: 4.0,
                band_width,
                noise: NOISE[(i / 2) % NOISE.len()],
                seed: 1000 + i as u64,
            })
        })
        .collect()
}
