//! Covariance kernels: the half-integer Matérn family, kernel sums and
//! scaling, and Gram-matrix assembly.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// A symmetric positive-semidefinite covariance function on `R^dim`.
pub trait Kernel: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64], y: &[f64]) -> f64;

    /// Convenience for one-dimensional kernels.
    fn eval1(&self, x: f64, y: f64) -> f64 {
        self.eval(&[x], &[y])
    }
}

impl<K: Kernel + ?Sized> Kernel for Arc<K> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        (**self).eval(x, y)
    }
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        (**self).eval(x, y)
    }
}

/// Largest supported half-integer order `p` in `ν = p + 1/2`.
pub const MAX_MATERN_ORDER: usize = 8;

/// Parameters of a Matérn kernel `σ² 2^{1-ν}/Γ(ν) (√(2ν) r/ℓ)^ν K_ν(√(2ν) r/ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaternParams {
    pub nu: f64,
    pub lengthscale: f64,
    pub variance: f64,
}

impl MaternParams {
    pub fn new(nu: f64, lengthscale: f64, variance: f64) -> Result<Self> {
        let params = Self {
            nu,
            lengthscale,
            variance,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        half_integer_order(self.nu)?;
        if !(self.lengthscale > 0.0) || !self.lengthscale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Matérn lengthscale must be positive, got {}",
                self.lengthscale
            )));
        }
        if !(self.variance > 0.0) || !self.variance.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Matérn variance must be positive, got {}",
                self.variance
            )));
        }
        Ok(())
    }

    /// Sobolev order `ν + d/2` of the kernel's native space.
    pub fn rkhs_order(&self, dim: usize) -> f64 {
        self.nu + dim as f64 / 2.0
    }
}

/// Returns `p` for `ν = p + 1/2`, rejecting everything without a closed form.
fn half_integer_order(nu: f64) -> Result<usize> {
    let p = nu - 0.5;
    if !nu.is_finite() || p < 0.0 || p.fract() != 0.0 {
        return Err(Error::Unsupported(format!(
            "Matérn smoothness nu = {nu}: only half-integers 1/2, 3/2, 5/2, ... have a closed form"
        )));
    }
    let p = p as usize;
    if p > MAX_MATERN_ORDER {
        return Err(Error::Unsupported(format!(
            "Matérn smoothness nu = {nu} exceeds the largest supported half-integer {}",
            MAX_MATERN_ORDER as f64 + 0.5
        )));
    }
    Ok(p)
}

/// Matérn kernel with half-integer smoothness, evaluated as
/// `σ² e^{-z} Σ_i c_i z^{p-i}` with `z = √(2ν) r / ℓ`.
#[derive(Clone)]
pub struct Matern {
    params: MaternParams,
    dim: usize,
    scale: f64,
    // Horner order: highest power first.
    coeffs: Vec<f64>,
}

impl Matern {
    pub fn new(params: MaternParams, dim: usize) -> Result<Self> {
        params.validate()?;
        if dim == 0 {
            return Err(Error::InvalidParameter("kernel dimension must be positive".into()));
        }
        let p = half_integer_order(params.nu)?;
        let factorial = |k: usize| (1..=k).map(|v| v as f64).product::<f64>();
        let lead = factorial(p) / factorial(2 * p);
        let coeffs = (0..=p)
            .map(|i| {
                lead * factorial(p + i) / (factorial(i) * factorial(p - i))
                    * 2f64.powi((p - i) as i32)
            })
            .collect();
        Ok(Self {
            params,
            dim,
            scale: (2.0 * params.nu).sqrt() / params.lengthscale,
            coeffs,
        })
    }

    /// One-dimensional Matérn kernel.
    pub fn new_1d(nu: f64, lengthscale: f64, variance: f64) -> Result<Self> {
        Self::new(MaternParams::new(nu, lengthscale, variance)?, 1)
    }

    pub fn params(&self) -> MaternParams {
        self.params
    }

    /// Kernel value as a function of the distance `r ≥ 0`.
    pub fn eval_distance(&self, r: f64) -> f64 {
        let z = self.scale * r;
        let poly = self.coeffs.iter().fold(0.0, |acc, c| acc * z + c);
        self.params.variance * poly * (-z).exp()
    }
}

impl fmt::Debug for Matern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matern")
            .field("params", &self.params)
            .field("dim", &self.dim)
            .finish()
    }
}

impl Kernel for Matern {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        let r = x
            .iter()
            .zip(y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        self.eval_distance(r)
    }
}

/// Evaluates a Matérn kernel at two points.
pub fn matern_eval(x: &[f64], y: &[f64], params: &MaternParams) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(Matern::new(*params, x.len())?.eval(x, y))
}

/// The zero kernel.
#[derive(Debug, Clone, Copy)]
pub struct ZeroKernel {
    pub dim: usize,
}

impl Kernel for ZeroKernel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _x: &[f64], _y: &[f64]) -> f64 {
        0.0
    }
}

/// `K(x, y) = c` for a constant `c ≥ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantKernel {
    pub dim: usize,
    pub value: f64,
}

impl Kernel for ConstantKernel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, _x: &[f64], _y: &[f64]) -> f64 {
        self.value
    }
}

/// Pointwise sum of two kernels.
#[derive(Clone)]
pub struct SumKernel {
    first: Arc<dyn Kernel>,
    second: Arc<dyn Kernel>,
}

impl Kernel for SumKernel {
    fn dim(&self) -> usize {
        self.first.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.first.eval(x, y) + self.second.eval(x, y)
    }
}

pub fn kernel_sum(first: Arc<dyn Kernel>, second: Arc<dyn Kernel>) -> Result<SumKernel> {
    if first.dim() != second.dim() {
        return Err(Error::DimensionMismatch {
            expected: first.dim(),
            got: second.dim(),
        });
    }
    Ok(SumKernel { first, second })
}

/// `c · K` for `c ≥ 0`.
#[derive(Clone)]
pub struct ScaledKernel {
    inner: Arc<dyn Kernel>,
    factor: f64,
}

impl ScaledKernel {
    pub fn new(inner: Arc<dyn Kernel>, factor: f64) -> Result<Self> {
        if !(factor >= 0.0) || !factor.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kernel scale must be nonnegative, got {factor}"
            )));
        }
        Ok(Self { inner, factor })
    }
}

impl Kernel for ScaledKernel {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.factor * self.inner.eval(x, y)
    }
}

/// Symmetric Gram matrix `G[i][j] = K(x_i, x_j)`.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub entries: DMatrix<f64>,
    /// Index pairs `(i, j)`, `i < j`, of coinciding points. A nonempty list
    /// means the matrix is singular; conditioning still works once noise is added.
    pub duplicate_pairs: Vec<(usize, usize)>,
}

impl GramMatrix {
    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.entries)
    }

    pub fn is_psd(&self) -> bool {
        linalg::is_psd(&self.entries)
    }
}

/// Assembles the Gram matrix of `kernel` on `points`. Only the upper triangle
/// is evaluated and mirrored, so the result is exactly symmetric.
pub fn gram<K, P>(kernel: &K, points: &[P]) -> Result<GramMatrix>
where
    K: Kernel + ?Sized,
    P: AsRef<[f64]>,
{
    let n = points.len();
    for p in points {
        if p.as_ref().len() != kernel.dim() {
            return Err(Error::DimensionMismatch {
                expected: kernel.dim(),
                got: p.as_ref().len(),
            });
        }
    }
    let mut entries = DMatrix::zeros(n, n);
    let mut duplicate_pairs = Vec::new();
    for i in 0..n {
        let xi = points[i].as_ref();
        for j in i..n {
            let xj = points[j].as_ref();
            let v = kernel.eval(xi, xj);
            entries[(i, j)] = v;
            entries[(j, i)] = v;
            if j > i && xi == xj {
                duplicate_pairs.push((i, j));
            }
        }
    }
    if !duplicate_pairs.is_empty() {
        log::warn!(
            "Gram matrix built on {} coinciding point pair(s); it is singular",
            duplicate_pairs.len()
        );
    }
    Ok(GramMatrix {
        entries,
        duplicate_pairs,
    })
}

/// Cross-covariance matrix `C[i][j] = K(a_i, b_j)`.
pub fn cross_gram<K, P, Q>(kernel: &K, a: &[P], b: &[Q]) -> DMatrix<f64>
where
    K: Kernel + ?Sized,
    P: AsRef<[f64]>,
    Q: AsRef<[f64]>,
{
    DMatrix::from_fn(a.len(), b.len(), |i, j| {
        kernel.eval(a[i].as_ref(), b[j].as_ref())
    })
}
