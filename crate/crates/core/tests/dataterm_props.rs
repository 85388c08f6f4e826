use proptest::prelude::*;

use nwmatte::dataterm::{collect_samples, compute_data_term, data_weights, estimate_alpha_pair, terminal_weights};
use nwmatte::synth::{generate, Boundary, ColorField, SyntheticSpec};
use nwmatte::{Image, Label, Rgb, SamplingParams, Trimap};

fn rgb() -> impl Strategy<Value = Rgb> {
    prop::array::uniform3(0.0f64..1.0)
}

/// Rotation matrix from a unit quaternion.
fn rotation(q: [f64; 4]) -> [[f64; 3]; 3] {
    let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
    let [w, x, y, z] = q.map(|v| v / n);
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

fn apply(m: &[[f64; 3]; 3], v: Rgb) -> Rgb {
    m.map(|row| row[0] * v[0] + row[1] * v[1] + row[2] * v[2])
}

proptest! {
    #[test]
    fn alpha_pair_rotation_invariant(i in rgb(), f in rgb(), b in rgb(), q in prop::array::uniform4(0.1f64..1.0)) {
        let dist2: f64 = (0..3).map(|k| (f[k] - b[k]).powi(2)).sum();
        prop_assume!(dist2 > 1e-3);
        let r = rotation(q);
        let plain = estimate_alpha_pair(i, f, b);
        let rotated = estimate_alpha_pair(apply(&r, i), apply(&r, f), apply(&r, b));
        prop_assert!((plain - rotated).abs() < 1e-9, "{plain} vs {rotated}");
    }

    #[test]
    fn swapping_fg_and_bg_complements_alpha(i in rgb(), f in rgb(), b in rgb()) {
        let dist2: f64 = (0..3).map(|k| (f[k] - b[k]).powi(2)).sum();
        prop_assume!(dist2 > 1e-3);
        let a = estimate_alpha_pair(i, f, b);
        let swapped = estimate_alpha_pair(i, b, f);
        prop_assert!((swapped - (1.0 - a)).abs() < 1e-12);
    }

    #[test]
    fn terminal_weights_partition_unity(a in 0.0f64..=1.0, conf in 0.0f64..=1.0, gamma in 0.1f64..10.0) {
        let (wf, wb) = terminal_weights(a, conf, gamma);
        prop_assert!((wf + wb - gamma).abs() < 1e-12 * gamma.max(1.0));
        prop_assert!(wf >= 0.0 && wb >= 0.0);
    }

    #[test]
    fn constant_composite_is_recovered(
        f in rgb(), b in rgb(), angle in 0.0f64..std::f64::consts::TAU, size in 12usize..24,
    ) {
        let dist2: f64 = (0..3).map(|k| (f[k] - b[k]).powi(2)).sum();
        prop_assume!(dist2 > 1e-2);
        let c = generate(&SyntheticSpec {
            foreground: ColorField::Constant(f),
            background: ColorField::Constant(b),
            boundary: Boundary::Line { angle },
            ..SyntheticSpec::new(size, size)
        });
        let field = compute_data_term(&c.image, &c.trimap, &SamplingParams::default()).unwrap();
        for (&z, &a) in field.pixels.iter().zip(&field.alpha_hat) {
            prop_assert!((a - c.truth.get(z)).abs() < 1e-9, "pixel {z}: {a} vs {}", c.truth.get(z));
        }
    }
}

#[test]
fn weights_sum_to_gamma_on_real_field() {
    let c = generate(&SyntheticSpec {
        noise: 0.03,
        seed: 5,
        ..SyntheticSpec::new(20, 20)
    });
    let field = compute_data_term(&c.image, &c.trimap, &SamplingParams::default()).unwrap();
    let w = data_weights(&field, &c.trimap, 2.0).unwrap();
    for z in c.trimap.unknown_indices() {
        assert!((w.to_fg[z] + w.to_bg[z] - 2.0).abs() < 1e-12);
    }
}

#[test]
fn nearest_samples_match_brute_force() {
    let (w, h) = (9, 7);
    let trimap = Trimap::from_fn(w, h, |x, y| match (x, y) {
        (_, 0) | (0, _) => Label::Foreground,
        (_, 6) | (8, _) => Label::Background,
        _ => Label::Unknown,
    });
    let image = Image::from_fn(w, h, |x, y| [x as f64 / 8.0, y as f64 / 6.0, 0.5]);
    let boundary_of = |label| -> Vec<usize> {
        (0..w * h)
            .filter(|&i| trimap.label(i) == label && trimap.is_boundary(i))
            .collect()
    };
    for z in trimap.unknown_indices() {
        let s = collect_samples(&trimap, &image, z, 4).unwrap();
        for (label, got) in [(Label::Foreground, &s.fg_samples), (Label::Background, &s.bg_samples)] {
            let mut all: Vec<(usize, usize)> = boundary_of(label)
                .into_iter()
                .map(|c| {
                    let dx = (c % w).abs_diff(z % w);
                    let dy = (c / w).abs_diff(z / w);
                    (dx * dx + dy * dy, c)
                })
                .collect();
            all.sort();
            let want: Vec<usize> = all.iter().take(4).map(|p| p.1).collect();
            let got: Vec<usize> = got.iter().map(|p| p.0).collect();
            assert_eq!(got, want, "pixel {z}");
        }
    }
}
