//! Combined system assembly, known/unknown partition and the conjugate gradient solve.
//!
//! The combined Laplacian is `lambda * W + (1 - lambda) * L_lap`, where `W`
//! is the Laplacian of a graph whose only edges join each pixel to a
//! foreground terminal (alpha 1) and a background terminal (alpha 0). The
//! terminals are never materialised: pinning them to 1 and 0 adds
//! `lambda * (w_F + w_B)` to the pixel's diagonal and `lambda * w_F` to its
//! right-hand side.

use crate::dataterm::TerminalWeights;
use crate::error::{MattingError, Result};
use crate::imageio::{AlphaMatte, Label, Trimap};
use crate::sparse::SparseSymMatrix;

pub const DEFAULT_LAMBDA: f64 = 0.001;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgParams {
    /// Relative residual target `|A x - b| / |b|`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for CgParams {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 2000,
        }
    }
}

impl CgParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(MattingError::InvalidParameter("cg tol must be > 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CombinedSystem {
    matrix: SparseSymMatrix,
    terminal_rhs: Vec<f64>,
    lambda: f64,
}

impl CombinedSystem {
    /// The system with no data term at all: the bare Laplacian and a zero terminal load.
    pub fn propagation_only(l_lap: &SparseSymMatrix) -> Self {
        Self {
            matrix: l_lap.clone(),
            terminal_rhs: vec![0.0; l_lap.n()],
            lambda: 0.0,
        }
    }

    pub fn matrix(&self) -> &SparseSymMatrix {
        &self.matrix
    }

    /// Per-pixel right-hand side contributed by the eliminated foreground terminal.
    pub fn terminal_rhs(&self) -> &[f64] {
        &self.terminal_rhs
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub fn assemble(
    lambda: f64,
    weights: &TerminalWeights,
    l_lap: &SparseSymMatrix,
) -> Result<CombinedSystem> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(MattingError::BadLambda(lambda));
    }
    let n = l_lap.n();
    for len in [weights.to_fg.len(), weights.to_bg.len()] {
        if len != n {
            return Err(MattingError::LengthMismatch {
                expected: n,
                found: len,
            });
        }
    }
    let diag: Vec<f64> = weights
        .to_fg
        .iter()
        .zip(&weights.to_bg)
        .map(|(f, b)| lambda * (f + b))
        .collect();
    let matrix = l_lap.scaled_plus_diagonal(1.0 - lambda, &diag)?;
    let terminal_rhs = weights.to_fg.iter().map(|f| lambda * f).collect();
    Ok(CombinedSystem {
        matrix,
        terminal_rhs,
        lambda,
    })
}

/// The unknown block of a combined system and everything needed to solve for it.
#[derive(Debug, Clone)]
pub struct PartitionedSystem {
    /// Unknown-by-unknown block.
    pub l_u: SparseSymMatrix,
    /// Unknown-by-known coupling block, one sparse row per unknown pixel (columns index `known`).
    pub coupling: Vec<Vec<(usize, f64)>>,
    /// Alpha of each known pixel: 1 for foreground, 0 for background.
    pub q_k: Vec<f64>,
    /// Pixel index of each unknown, in solve order.
    pub unknown: Vec<usize>,
    /// Pixel index of each known pixel, in `q_k` order.
    pub known: Vec<usize>,
    /// `terminal load - coupling * q_k` for each unknown.
    pub rhs: Vec<f64>,
}

pub fn partition(system: &CombinedSystem, trimap: &Trimap) -> Result<PartitionedSystem> {
    let n = system.matrix.n();
    if trimap.len() != n {
        return Err(MattingError::LengthMismatch {
            expected: n,
            found: trimap.len(),
        });
    }
    const NONE: usize = usize::MAX;
    let mut position = vec![NONE; n];
    let mut unknown = Vec::new();
    let mut known = Vec::new();
    let mut q_k = Vec::new();
    for (idx, &label) in trimap.labels().iter().enumerate() {
        match label {
            Label::Unknown => {
                position[idx] = unknown.len();
                unknown.push(idx);
            }
            _ => {
                position[idx] = known.len();
                known.push(idx);
                q_k.push(if label == Label::Foreground { 1.0 } else { 0.0 });
            }
        }
    }
    if unknown.is_empty() {
        return Err(MattingError::NoUnknownPixels);
    }

    let mut rows = Vec::with_capacity(unknown.len());
    let mut coupling = Vec::with_capacity(unknown.len());
    let mut rhs = Vec::with_capacity(unknown.len());
    for &pix in &unknown {
        let (cols, vals) = system.matrix.row(pix);
        let mut row = Vec::new();
        let mut couple = Vec::new();
        let mut load = 0.0;
        for (&c, &v) in cols.iter().zip(vals) {
            if trimap.label(c) == Label::Unknown {
                row.push((position[c], v));
            } else {
                couple.push((position[c], v));
                load += v * q_k[position[c]];
            }
        }
        rows.push(row);
        coupling.push(couple);
        rhs.push(system.terminal_rhs[pix] - load);
    }
    Ok(PartitionedSystem {
        l_u: SparseSymMatrix::from_rows(unknown.len(), rows),
        coupling,
        q_k,
        unknown,
        known,
        rhs,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// True relative residual `|A x - b| / |b|` of the returned iterate.
    pub residual: f64,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Jacobi-preconditioned conjugate gradient for a symmetric positive definite `a`.
///
/// Converges on the recurrence residual, then confirms against the true
/// residual and restarts from the current iterate if rounding has let the two drift apart.
pub fn conjugate_gradient(a: &SparseSymMatrix, b: &[f64], params: &CgParams) -> CgSolution {
    let n = a.n();
    assert_eq!(b.len(), n);
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return CgSolution {
            x: vec![0.0; n],
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 1.0 })
        .collect();
    let precondition = |r: &[f64], z: &mut Vec<f64>| {
        z.clear();
        z.extend(r.iter().zip(&inv_diag).map(|(r, m)| r * m));
    };
    let true_residual = |x: &[f64], r: &mut Vec<f64>| {
        let ax = a.mul_vec(x);
        r.clear();
        r.extend(b.iter().zip(&ax).map(|(b, ax)| b - ax));
    };

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = Vec::with_capacity(n);
    let mut ap = vec![0.0; n];
    let mut iterations = 0;

    'restart: loop {
        precondition(&r, &mut z);
        let mut p = z.clone();
        let mut rz = dot(&r, &z);
        loop {
            if norm(&r) / b_norm <= params.tol {
                true_residual(&x, &mut r);
                let residual = norm(&r) / b_norm;
                if residual <= params.tol {
                    return CgSolution {
                        x,
                        iterations,
                        residual,
                        converged: true,
                    };
                }
                if iterations >= params.max_iter {
                    break 'restart;
                }
                continue 'restart;
            }
            if iterations >= params.max_iter {
                break 'restart;
            }
            a.mul_vec_into(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                // Breakdown: the matrix is not positive definite along p.
                break 'restart;
            }
            let step = rz / pap;
            for i in 0..n {
                x[i] += step * p[i];
                r[i] -= step * ap[i];
            }
            iterations += 1;
            precondition(&r, &mut z);
            let rz_next = dot(&r, &z);
            let beta = rz_next / rz;
            rz = rz_next;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
    true_residual(&x, &mut r);
    let residual = norm(&r) / b_norm;
    CgSolution {
        x,
        iterations,
        residual,
        converged: residual <= params.tol,
    }
}

/// Solves `L_u q_u = rhs`; fails with `NotConverged` when the residual target is missed.
pub fn solve_cg(part: &PartitionedSystem, params: &CgParams) -> Result<Vec<f64>> {
    params.validate()?;
    let sol = conjugate_gradient(&part.l_u, &part.rhs, params);
    if sol.converged {
        Ok(sol.x)
    } else {
        Err(MattingError::NotConverged {
            residual: sol.residual,
            iterations: sol.iterations,
        })
    }
}

/// Places the solved unknown alphas into a full matte; known pixels take their label.
pub fn compose_matte(q_u: &[f64], trimap: &Trimap, unknown: &[usize]) -> Result<AlphaMatte> {
    if q_u.len() != unknown.len() {
        return Err(MattingError::LengthMismatch {
            expected: unknown.len(),
            found: q_u.len(),
        });
    }
    let mut alpha: Vec<f64> = AlphaMatte::from_trimap(trimap).values().to_vec();
    for (&pix, &q) in unknown.iter().zip(q_u) {
        if trimap.label(pix) != Label::Unknown {
            return Err(MattingError::InvalidData(format!(
                "pixel {pix} is not unknown in the trimap"
            )));
        }
        alpha[pix] = q.clamp(0.0, 1.0);
    }
    AlphaMatte::new(trimap.width(), trimap.height(), alpha)
}
