use std::fmt::Write as _;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::data::{simulate_data, substream, L2Quadrature};
use super::points::{uniform_points, PointSet};
use super::problem::{OperatorChoice, Truth};
use crate::error::{Error, Result};
use crate::fem::{induced_prior, MMode, Mesh1D};
use crate::gp::{Conditioner, MeanFn, ZeroMean};
use crate::kernels::{Kernel, Matern, MaternParams};

pub const DEFAULT_SEED: u64 = 20_210_901;
/// Smallest `n` values left out of the slope fit (pre-asymptotic regime).
pub const DEFAULT_FIT_SKIP: usize = 2;
/// Minimum number of `n` values a slope fit may use.
pub const MIN_FIT_POINTS: usize = 4;
/// Finite element convergence order of piecewise-linear elements for Poisson's equation.
pub const FE_ORDER: f64 = 2.0;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_fit_skip() -> usize {
    DEFAULT_FIT_SKIP
}

/// Declarative description of a convergence study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Matérn source priors `(ν, ℓ, σ²)`.
    pub kernels: Vec<MaternParams>,
    pub n_fe: Vec<usize>,
    /// Numbers of uniformly placed observations.
    pub n: Vec<usize>,
    /// Observation noise standard deviation `σ_ε`.
    pub noise_sd: f64,
    /// Noise realizations averaged per row.
    pub realizations: usize,
    #[serde(default)]
    pub mode: MMode,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub operator: OperatorChoice,
    #[serde(default)]
    pub truth: Truth,
    /// Also run the data-driven Matérn baseline.
    #[serde(default)]
    pub baseline: bool,
    #[serde(default = "default_fit_skip")]
    pub fit_skip: usize,
}

impl ExperimentConfig {
    /// The `ν = 1/2`, `ℓ = 1/2`, `σ² = 120` row at desk scale.
    pub fn demo() -> Self {
        Self {
            kernels: vec![MaternParams {
                nu: 0.5,
                lengthscale: 0.5,
                variance: 120.0,
            }],
            n_fe: vec![256, 512],
            n: vec![3, 7, 15, 31, 63, 127, 255],
            noise_sd: 1e-3,
            realizations: 20,
            mode: MMode::Lumped,
            seed: DEFAULT_SEED,
            operator: OperatorChoice::Poisson,
            truth: Truth::TwoMode,
            baseline: true,
            fit_skip: DEFAULT_FIT_SKIP,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.kernels.is_empty() {
            return fail("kernels: list must not be empty".into());
        }
        for (i, k) in self.kernels.iter().enumerate() {
            if let Err(e) = k.validate() {
                return fail(format!("kernels[{i}]: {e}"));
            }
        }
        if self.n_fe.is_empty() {
            return fail("n_fe: list must not be empty".into());
        }
        if let Some(i) = self.n_fe.iter().position(|&v| v == 0) {
            return fail(format!("n_fe[{i}]: must be at least 1"));
        }
        if self.n.is_empty() {
            return fail("n: list must not be empty".into());
        }
        if let Some(i) = self.n.iter().position(|&v| v == 0) {
            return fail(format!("n[{i}]: must be at least 1"));
        }
        if self.n.len() > 1 && self.n.windows(2).any(|w| w[0] >= w[1]) {
            return fail("n: values must be strictly increasing".into());
        }
        if !(self.noise_sd > 0.0) || !self.noise_sd.is_finite() {
            return fail(format!("noise_sd: must be positive, got {}", self.noise_sd));
        }
        if self.realizations == 0 {
            return fail("realizations: must be at least 1".into());
        }
        Ok(())
    }
}

/// Exponent `−1/2 + d/(4k)` of the predicted decay `n^{−1/2 + d/(4k)}`, `k = ν + d/2`.
pub fn theory_slope(nu: f64, dim: usize) -> f64 {
    let d = dim as f64;
    let k = nu + d / 2.0;
    -0.5 + d / (4.0 * k)
}

/// `n_FE = ⌈n^{(2 − d/(4k))/q}⌉`, the finite element count that balances both error terms.
pub fn heuristic_n_fe(n: usize, nu: f64, dim: usize, fe_order: f64) -> usize {
    let d = dim as f64;
    let k = nu + d / 2.0;
    (n as f64).powf((2.0 - d / (4.0 * k)) / fe_order).ceil() as usize
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Mean and sample standard deviation, summed in index order.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub params: MaternParams,
    pub n_fe: usize,
    pub n: usize,
    pub mean_l2: f64,
    pub std_l2: f64,
}

/// Slope fit of one `(kernel, n_FE)` series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFit {
    pub params: MaternParams,
    pub n_fe: usize,
    pub theory_slope: f64,
    pub fitted_slope: Option<f64>,
    /// The `n` values that entered the fit.
    pub fit_n: Vec<usize>,
}

/// Noise-averaged `L²` errors per row and fitted log-log slopes per series.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    pub series: Vec<SeriesFit>,
    /// Rows that could not be computed, with the reason.
    pub diagnostics: Vec<String>,
}

pub const CSV_HEADER: &str = "nu,lengthscale,variance,n_fe,n,mean_l2,std_l2,theory_slope,fitted_slope";

impl RateTable {
    pub fn series_for(&self, params: &MaternParams, n_fe: usize) -> Option<&SeriesFit> {
        self.series
            .iter()
            .find(|s| s.params == *params && s.n_fe == n_fe)
    }

    pub fn rows_for<'a>(
        &'a self,
        params: &'a MaternParams,
        n_fe: usize,
    ) -> impl Iterator<Item = &'a RateRow> + 'a {
        self.rows
            .iter()
            .filter(move |r| r.params == *params && r.n_fe == n_fe)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let fit = self.series_for(&r.params, r.n_fe);
            let theory = fit.map_or(f64::NAN, |s| s.theory_slope);
            let fitted = fit.and_then(|s| s.fitted_slope).unwrap_or(f64::NAN);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.params.nu,
                r.params.lengthscale,
                r.params.variance,
                r.n_fe,
                r.n,
                r.mean_l2,
                r.std_l2,
                theory,
                fitted
            );
        }
        out
    }

    pub(crate) fn push_series(&mut self, params: MaternParams, n_fe: usize, fit_skip: usize) {
        let rows: Vec<&RateRow> = self.rows_for(&params, n_fe).collect();
        let used: Vec<&&RateRow> = rows.iter().skip(fit_skip).collect();
        let fit_n: Vec<usize> = used.iter().map(|r| r.n).collect();
        let fitted_slope = if used.len() >= MIN_FIT_POINTS {
            let x: Vec<f64> = used.iter().map(|r| r.n as f64).collect();
            let y: Vec<f64> = used.iter().map(|r| r.mean_l2).collect();
            fit_loglog_slope(&x, &y)
        } else {
            None
        };
        self.series.push(SeriesFit {
            params,
            n_fe,
            theory_slope: theory_slope(params.nu, 1),
            fitted_slope,
            fit_n,
        });
    }
}

/// Posterior means on the `L²` quadrature points for many data vectors at fixed locations.
pub struct GridPredictor {
    conditioner: Conditioner,
    prior_mean: Vec<f64>,
    cross: DMatrix<f64>,
    quadrature: L2Quadrature,
}

impl GridPredictor {
    pub fn new(conditioner: Conditioner) -> Self {
        let quadrature = L2Quadrature::default();
        let grid: Vec<[f64; 1]> = quadrature.points().iter().map(|&x| [x]).collect();
        let prior_mean = grid.iter().map(|p| conditioner.prior_mean(p)).collect();
        let cross = conditioner.cross_cov_matrix(&grid);
        Self {
            conditioner,
            prior_mean,
            cross,
            quadrature,
        }
    }

    pub fn conditioner(&self) -> &Conditioner {
        &self.conditioner
    }

    /// `‖u_t − m_{·|Y}‖_{L²}` for data `values`.
    pub fn l2_error<F: Fn(f64) -> f64 + ?Sized>(&self, u_t: &F, values: &[f64]) -> Result<f64> {
        let w = DVector::from_vec(self.conditioner.weights(values)?);
        let correction = &self.cross * w;
        Ok(self.quadrature.norm_from_values(
            self.quadrature
                .points()
                .iter()
                .zip(&self.prior_mean)
                .zip(correction.iter())
                .map(|((&x, m), c)| u_t(x) - (m + c)),
        ))
    }
}

/// `L²` errors of the posterior mean for each noise realization, in realization order.
pub fn realization_errors(
    prior_mean: Arc<dyn MeanFn>,
    prior_kernel: Arc<dyn Kernel>,
    points: &PointSet,
    truth: Truth,
    noise_sd: f64,
    realizations: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let conditioner = Conditioner::new(prior_mean, prior_kernel, points.as_coords(), noise_sd)?;
    let predictor = GridPredictor::new(conditioner);
    let u_t = move |x: f64| truth.solution(x);
    (0..realizations)
        .into_par_iter()
        .map(|r| {
            let mut rng = substream(seed, points.len(), r);
            let obs = simulate_data(&u_t, points, noise_sd, &mut rng)?;
            predictor.l2_error(&u_t, obs.values())
        })
        .collect()
}

/// Runs the statFEM convergence study described by `config`.
///
/// Every `(kernel, n_FE)` pair builds its induced prior once. Noise streams
/// depend only on `(seed, n, realization)`, so all priors (and the baseline)
/// see identical data. Realizations run on the current rayon pool and are
/// reduced in index order; the table does not depend on the thread count.
pub fn run_convergence(config: &ExperimentConfig) -> Result<RateTable> {
    config.validate()?;
    let op = config.operator.build();
    let mut table = RateTable::default();
    for params in &config.kernels {
        let source = Matern::new(*params, 1)?;
        for &n_fe in &config.n_fe {
            let prior = Mesh1D::uniform(n_fe)
                .and_then(|mesh| induced_prior(&op, &mesh, &source, &|_| 0.0, config.mode));
            let prior = match prior {
                Ok(p) => Arc::new(p),
                Err(e) => {
                    table.diagnostics.push(format!(
                        "nu={} lengthscale={} variance={} n_fe={n_fe}: prior construction failed: {e}",
                        params.nu, params.lengthscale, params.variance
                    ));
                    continue;
                }
            };
            for &n in &config.n {
                let errors = uniform_points(n).and_then(|x| {
                    realization_errors(
                        Arc::new(ZeroMean),
                        prior.clone(),
                        &x,
                        config.truth,
                        config.noise_sd,
                        config.realizations,
                        config.seed,
                    )
                });
                match errors {
                    Ok(errors) => {
                        let (mean_l2, std_l2) = mean_and_std(&errors);
                        table.rows.push(RateRow {
                            params: *params,
                            n_fe,
                            n,
                            mean_l2,
                            std_l2,
                        });
                    }
                    Err(e) => table.diagnostics.push(format!(
                        "nu={} lengthscale={} variance={} n_fe={n_fe} n={n}: {e}",
                        params.nu, params.lengthscale, params.variance
                    )),
                }
            }
            table.push_series(*params, n_fe, config.fit_skip);
        }
    }
    Ok(table)
}
