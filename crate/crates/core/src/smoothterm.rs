//! Local smoothness term: the closed-form matting Laplacian over 3x3 windows.

use crate::error::{MattingError, Result};
use crate::imageio::{Image, Rgb};
use crate::sparse::SparseSymMatrix;

pub const DEFAULT_LAPLACIAN_EPS: f64 = 1e-5;

const WIN: usize = 9;
/// Pixels that share a 3x3 window are at most 2 apart on each axis.
const REACH: i64 = 2;
const SLOTS: usize = 25;

#[inline]
fn slot(dx: i64, dy: i64) -> usize {
    ((dy + REACH) * 5 + (dx + REACH)) as usize
}

/// Inverse of a symmetric 3x3 matrix stored as `[xx, xy, xz, yy, yz, zz]`.
fn inverse_sym3(m: [f64; 6]) -> [f64; 6] {
    let [a, b, c, d, e, f] = m;
    let c00 = d * f - e * e;
    let c01 = c * e - b * f;
    let c02 = b * e - c * d;
    let c11 = a * f - c * c;
    let c12 = b * c - a * e;
    let c22 = a * d - b * b;
    let det = a * c00 + b * c01 + c * c02;
    [c00 / det, c01 / det, c02 / det, c11 / det, c12 / det, c22 / det]
}

#[inline]
fn quad_sym3(m: &[f64; 6], u: Rgb, v: Rgb) -> f64 {
    u[0] * (m[0] * v[0] + m[1] * v[1] + m[2] * v[2])
        + u[1] * (m[1] * v[0] + m[3] * v[1] + m[4] * v[2])
        + u[2] * (m[2] * v[0] + m[4] * v[1] + m[5] * v[2])
}

/// Builds the matting Laplacian of `image`.
///
/// Entry `(i, j)` sums, over every full 3x3 window `k` holding both pixels,
/// `delta_ij - (1 + (I_i - mu_k)^T (Sigma_k + eps/9 Id)^-1 (I_j - mu_k)) / 9`.
/// Pixels on the image border only take part through interior windows.
pub fn matting_laplacian(image: &Image, eps: f64) -> Result<SparseSymMatrix> {
    let (w, h) = (image.width(), image.height());
    if w < 3 || h < 3 {
        return Err(MattingError::ImageTooSmall {
            width: w,
            height: h,
        });
    }
    if !(eps > 0.0) {
        return Err(MattingError::InvalidParameter("laplacian eps must be > 0".into()));
    }
    let n = w * h;
    let mut acc = vec![[0.0f64; SLOTS]; n];
    let inv_win = 1.0 / WIN as f64;

    let mut idx = [0usize; WIN];
    let mut centered = [[0.0f64; 3]; WIN];
    for cy in 1..h - 1 {
        for cx in 1..w - 1 {
            let mut mean = [0.0; 3];
            for (k, slot_idx) in idx.iter_mut().enumerate() {
                let (x, y) = (cx + k % 3 - 1, cy + k / 3 - 1);
                *slot_idx = y * w + x;
                let p = image.pixel(*slot_idx);
                for c in 0..3 {
                    mean[c] += p[c];
                }
            }
            mean.iter_mut().for_each(|m| *m *= inv_win);
            let mut cov = [0.0; 6];
            for (k, &p_idx) in idx.iter().enumerate() {
                let p = image.pixel(p_idx);
                let d = [p[0] - mean[0], p[1] - mean[1], p[2] - mean[2]];
                centered[k] = d;
                cov[0] += d[0] * d[0];
                cov[1] += d[0] * d[1];
                cov[2] += d[0] * d[2];
                cov[3] += d[1] * d[1];
                cov[4] += d[1] * d[2];
                cov[5] += d[2] * d[2];
            }
            cov.iter_mut().for_each(|v| *v *= inv_win);
            let reg = eps * inv_win;
            cov[0] += reg;
            cov[3] += reg;
            cov[5] += reg;
            let inv = inverse_sym3(cov);

            for a in 0..WIN {
                for b in a..WIN {
                    let delta = if a == b { 1.0 } else { 0.0 };
                    let v = delta - inv_win * (1.0 + quad_sym3(&inv, centered[a], centered[b]));
                    let (pa, pb) = (idx[a], idx[b]);
                    let dx = (b % 3) as i64 - (a % 3) as i64;
                    let dy = (b / 3) as i64 - (a / 3) as i64;
                    acc[pa][slot(dx, dy)] += v;
                    if a != b {
                        acc[pb][slot(-dx, -dy)] += v;
                    }
                }
            }
        }
    }

    let rows = acc
        .iter()
        .enumerate()
        .map(|(i, slots)| {
            let (x, y) = ((i % w) as i64, (i / w) as i64);
            let mut row = Vec::with_capacity(SLOTS);
            for dy in -REACH..=REACH {
                for dx in -REACH..=REACH {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    row.push((ny as usize * w + nx as usize, slots[slot(dx, dy)]));
                }
            }
            row
        })
        .collect();
    Ok(SparseSymMatrix::from_rows(n, rows))
}
