//! One matting pass: data term, combined system, partition and solve.

use crate::dataterm::{compute_data_term, data_weights, SamplingParams};
use crate::error::{MattingError, Result};
use crate::imageio::{AlphaMatte, Image, Trimap};
use crate::smoothterm::{matting_laplacian, DEFAULT_LAPLACIAN_EPS};
use crate::solver::{
    assemble, compose_matte, conjugate_gradient, partition, CgParams, DEFAULT_LAMBDA,
};
use crate::sparse::SparseSymMatrix;

/// Data-term terminal weights are scaled by this; `lambda` carries the relative weight.
pub const GAMMA_SCALE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MattingConfig {
    pub lambda: f64,
    pub sampling: SamplingParams,
    pub laplacian_eps: f64,
    pub cg: CgParams,
}

impl Default for MattingConfig {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            sampling: SamplingParams::default(),
            laplacian_eps: DEFAULT_LAPLACIAN_EPS,
            cg: CgParams::default(),
        }
    }
}

impl MattingConfig {
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(MattingError::BadLambda(self.lambda));
        }
        if !(self.laplacian_eps > 0.0) {
            return Err(MattingError::InvalidParameter("laplacian eps must be > 0".into()));
        }
        self.sampling.validate()?;
        self.cg.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatteOutcome {
    pub matte: AlphaMatte,
    /// CG iterations used; zero when nothing had to be solved.
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

/// Mattes one image under successive trimaps, reusing its matting Laplacian.
#[derive(Debug, Clone)]
pub struct Matter<'a> {
    image: &'a Image,
    laplacian: SparseSymMatrix,
    config: MattingConfig,
}

impl<'a> Matter<'a> {
    pub fn new(image: &'a Image, config: MattingConfig) -> Result<Self> {
        config.validate()?;
        let laplacian = matting_laplacian(image, config.laplacian_eps)?;
        Ok(Self {
            image,
            laplacian,
            config,
        })
    }

    pub fn image(&self) -> &Image {
        self.image
    }

    pub fn laplacian(&self) -> &SparseSymMatrix {
        &self.laplacian
    }

    pub fn config(&self) -> &MattingConfig {
        &self.config
    }

    pub fn solve(&self, trimap: &Trimap) -> Result<MatteOutcome> {
        self.solve_with_lambda(trimap, self.config.lambda)
    }

    /// A non-converged solve is returned with `converged == false` rather than as an error.
    pub fn solve_with_lambda(&self, trimap: &Trimap, lambda: f64) -> Result<MatteOutcome> {
        trimap.check_dims(self.image.width(), self.image.height())?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(MattingError::BadLambda(lambda));
        }
        if trimap.unknown_indices().is_empty() {
            return Ok(MatteOutcome {
                matte: AlphaMatte::from_trimap(trimap),
                iterations: 0,
                residual: 0.0,
                converged: true,
            });
        }
        let field = compute_data_term(self.image, trimap, &self.config.sampling)?;
        let weights = data_weights(&field, trimap, GAMMA_SCALE)?;
        let system = assemble(lambda, &weights, &self.laplacian)?;
        let part = partition(&system, trimap)?;
        let sol = conjugate_gradient(&part.l_u, &part.rhs, &self.config.cg);
        if !sol.converged {
            log::warn!(
                "CG stopped at relative residual {:e} after {} iterations",
                sol.residual,
                sol.iterations
            );
        }
        Ok(MatteOutcome {
            matte: compose_matte(&sol.x, trimap, &part.unknown)?,
            iterations: sol.iterations,
            residual: sol.residual,
            converged: sol.converged,
        })
    }
}

/// Single matting pass without trimap refinement.
pub fn matte(image: &Image, trimap: &Trimap, config: &MattingConfig) -> Result<MatteOutcome> {
    Matter::new(image, *config)?.solve(trimap)
}
