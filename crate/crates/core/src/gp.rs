//! Gaussian process conditioning on noisy point observations.
//!
//! Given a prior `GP(m, K)` and data `y_i = u(x_i) + ε_i`, `ε_i ~ N(0, σ²)`,
//! the posterior has
//!
//! ```text
//! mean(x)   = m(x) + k(x)ᵀ (K(X, X) + σ² I)⁻¹ (Y − m(X))
//! cov(x, y) = K(x, y) − k(x)ᵀ (K(X, X) + σ² I)⁻¹ k(y)
//! ```
//!
//! The same code serves the exact prior, the finite element prior and the
//! prior augmented by a discrepancy term: only the `(m, K)` pair changes.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fem::InducedPrior;
use crate::kernels::{cross_gram, gram, kernel_sum, Kernel};
use crate::linalg::{dot, Cholesky};

/// Two-sided standard normal quantile for a 95% credible interval.
pub const CREDIBLE_95_Z: f64 = 1.959964;

/// A prior mean function.
pub trait MeanFn: Send + Sync {
    fn eval(&self, x: &[f64]) -> f64;
}

impl<F> MeanFn for F
where
    F: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn eval(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

impl MeanFn for InducedPrior {
    fn eval(&self, x: &[f64]) -> f64 {
        self.mean(x[0])
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroMean;

impl MeanFn for ZeroMean {
    fn eval(&self, _x: &[f64]) -> f64 {
        0.0
    }
}

/// Pointwise sum of two mean functions.
#[derive(Clone)]
pub struct SumMean(pub Arc<dyn MeanFn>, pub Arc<dyn MeanFn>);

impl MeanFn for SumMean {
    fn eval(&self, x: &[f64]) -> f64 {
        self.0.eval(x) + self.1.eval(x)
    }
}

/// Noisy observations `Y` at locations `X` with noise standard deviation `σ_ε > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    noise_sd: f64,
}

impl Observations {
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>, noise_sd: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("at least one observation is required".into()));
        }
        if points.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: values.len(),
            });
        }
        let dim = points[0].len();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        if !(noise_sd > 0.0) || !noise_sd.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise standard deviation must be positive, got {noise_sd}"
            )));
        }
        Ok(Self {
            points,
            values,
            noise_sd,
        })
    }

    /// Observations on the real line.
    pub fn from_1d(xs: &[f64], values: Vec<f64>, noise_sd: f64) -> Result<Self> {
        Self::new(xs.iter().map(|&x| vec![x]).collect(), values, noise_sd)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }

    /// Same locations and noise level, new data vector.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.points.clone(), values, self.noise_sd)
    }
}

/// The data-independent half of conditioning: a prior, the observation
/// locations and the Cholesky factor of `K(X, X) + σ² I`. Posteriors for many
/// data vectors at the same locations share one factorisation.
#[derive(Clone)]
pub struct Conditioner {
    prior_mean: Arc<dyn MeanFn>,
    prior_kernel: Arc<dyn Kernel>,
    points: Arc<Vec<Vec<f64>>>,
    noise_sd: f64,
    chol: Arc<Cholesky>,
}

impl Conditioner {
    pub fn new(
        prior_mean: Arc<dyn MeanFn>,
        prior_kernel: Arc<dyn Kernel>,
        points: Vec<Vec<f64>>,
        noise_sd: f64,
    ) -> Result<Self> {
        if !(noise_sd > 0.0) || !noise_sd.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "noise standard deviation must be positive, got {noise_sd}"
            )));
        }
        let mut g = gram(prior_kernel.as_ref(), &points)?.entries;
        let noise_var = noise_sd * noise_sd;
        for i in 0..points.len() {
            g[(i, i)] += noise_var;
        }
        let chol = Cholesky::new(&g)?;
        Ok(Self {
            prior_mean,
            prior_kernel,
            points: Arc::new(points),
            noise_sd,
            chol: Arc::new(chol),
        })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }

    pub fn prior_mean(&self, x: &[f64]) -> f64 {
        self.prior_mean.eval(x)
    }

    pub fn prior_cov(&self, x: &[f64], y: &[f64]) -> f64 {
        self.prior_kernel.eval(x, y)
    }

    /// `(K(X, X) + σ² I)⁻¹ (Y − m(X))`.
    pub fn weights(&self, values: &[f64]) -> Result<Vec<f64>> {
        if values.len() != self.points.len() {
            return Err(Error::DimensionMismatch {
                expected: self.points.len(),
                got: values.len(),
            });
        }
        let residual: Vec<f64> = self
            .points
            .iter()
            .zip(values)
            .map(|(p, y)| y - self.prior_mean.eval(p))
            .collect();
        Ok(self.chol.solve(&residual))
    }

    /// `k(x) = (K(x, x_1), …, K(x, x_n))`.
    pub fn cross_cov(&self, x: &[f64]) -> Vec<f64> {
        self.points
            .iter()
            .map(|p| self.prior_kernel.eval(x, p))
            .collect()
    }

    /// Cross-covariance matrix between `grid` and the observation locations.
    pub fn cross_cov_matrix<P: AsRef<[f64]>>(&self, grid: &[P]) -> DMatrix<f64> {
        cross_gram(self.prior_kernel.as_ref(), grid, &self.points)
    }

    pub fn posterior(&self, values: &[f64]) -> Result<PosteriorModel> {
        let weights = self.weights(values)?;
        Ok(PosteriorModel {
            conditioner: self.clone(),
            weights,
        })
    }
}

/// Posterior mean and covariance evaluators.
#[derive(Clone)]
pub struct PosteriorModel {
    conditioner: Conditioner,
    weights: Vec<f64>,
}

impl PosteriorModel {
    pub fn conditioner(&self) -> &Conditioner {
        &self.conditioner
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mean(&self, x: &[f64]) -> f64 {
        self.conditioner.prior_mean(x) + dot(&self.conditioner.cross_cov(x), &self.weights)
    }

    pub fn mean1(&self, x: f64) -> f64 {
        self.mean(&[x])
    }

    pub fn cov(&self, x: &[f64], y: &[f64]) -> f64 {
        let chol = &self.conditioner.chol;
        let mut vx = self.conditioner.cross_cov(x);
        let mut vy = self.conditioner.cross_cov(y);
        chol.forward_in_place(&mut vx);
        chol.forward_in_place(&mut vy);
        self.conditioner.prior_cov(x, y) - dot(&vx, &vy)
    }

    /// Raw posterior variance; may dip below zero by roundoff.
    pub fn variance(&self, x: &[f64]) -> f64 {
        let mut v = self.conditioner.cross_cov(x);
        self.conditioner.chol.forward_in_place(&mut v);
        self.conditioner.prior_cov(x, x) - dot(&v, &v)
    }
}

/// Conditions `GP(prior_mean, prior_kernel)` on `obs`.
pub fn condition(
    prior_mean: Arc<dyn MeanFn>,
    prior_kernel: Arc<dyn Kernel>,
    obs: &Observations,
) -> Result<PosteriorModel> {
    Conditioner::new(prior_mean, prior_kernel, obs.points.clone(), obs.noise_sd)?
        .posterior(&obs.values)
}

/// Conditions the finite element prior plus an independent discrepancy process
/// `GP(m_d, K_d)`, i.e. the prior `GP(m_u + m_d, K_u + K_d)`.
pub fn condition_with_discrepancy(
    induced: &InducedPrior,
    disc_mean: Arc<dyn MeanFn>,
    disc_kernel: Arc<dyn Kernel>,
    obs: &Observations,
) -> Result<PosteriorModel> {
    let induced: Arc<InducedPrior> = Arc::new(induced.clone());
    let mean = SumMean(induced.clone(), disc_mean);
    let kernel = kernel_sum(induced, disc_kernel)?;
    condition(Arc::new(mean), Arc::new(kernel), obs)
}

/// Diagonal of the posterior covariance on `grid`, unclamped.
pub fn posterior_variance_grid<P: AsRef<[f64]>>(model: &PosteriorModel, grid: &[P]) -> Vec<f64> {
    grid.iter().map(|x| model.variance(x.as_ref())).collect()
}

/// Half-width of the 95% credible interval. Negative roundoff variances are clamped here.
pub fn credible_half_width(variance: f64) -> f64 {
    CREDIBLE_95_Z * variance.max(0.0).sqrt()
}
