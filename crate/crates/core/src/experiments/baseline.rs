use std::sync::Arc;

use super::convergence::{mean_and_std, realization_errors, ExperimentConfig, RateRow, RateTable};
use super::points::uniform_points;
use crate::error::Result;
use crate::gp::{condition, Observations, PosteriorModel, ZeroMean};
use crate::kernels::{Matern, MaternParams};

pub const BASELINE_SIGMA: f64 = 1.0;
pub const BASELINE_LENGTHSCALE: f64 = 1.0;
/// The baseline kernel is smoother than the source prior by this much, matching
/// the regularity of the induced solution prior.
pub const BASELINE_NU_SHIFT: f64 = 2.0;

/// The zero-mean Matérn prior used by the data-driven baseline for a source prior of order `source_nu`.
pub fn baseline_params(source_nu: f64, sigma: f64, lengthscale: f64) -> Result<MaternParams> {
    MaternParams::new(source_nu + BASELINE_NU_SHIFT, lengthscale, sigma * sigma)
}

/// Plain GP regression with a zero-mean `Matérn(ν + 2, ℓ, σ²)` prior; it
/// ignores the differential equation entirely.
pub fn matern_baseline(
    obs: &Observations,
    source_nu: f64,
    sigma: f64,
    lengthscale: f64,
) -> Result<PosteriorModel> {
    let kernel = Matern::new(baseline_params(source_nu, sigma, lengthscale)?, obs_dim(obs))?;
    condition(Arc::new(ZeroMean), Arc::new(kernel), obs)
}

fn obs_dim(obs: &Observations) -> usize {
    obs.points().first().map_or(1, Vec::len)
}

/// The baseline counterpart of [`super::run_convergence`].
///
/// Rows are keyed by the source kernel and `n_FE` of each statFEM series so the
/// two tables line up row for row; the baseline itself does not depend on
/// `n_FE`, and its errors are computed once per kernel and repeated.
pub fn run_baseline(config: &ExperimentConfig) -> Result<RateTable> {
    config.validate()?;
    let mut table = RateTable::default();
    for params in &config.kernels {
        let kernel = Arc::new(Matern::new(
            baseline_params(params.nu, BASELINE_SIGMA, BASELINE_LENGTHSCALE)?,
            1,
        )?);
        let mut stats = Vec::with_capacity(config.n.len());
        for &n in &config.n {
            let errors = uniform_points(n).and_then(|x| {
                realization_errors(
                    Arc::new(ZeroMean),
                    kernel.clone(),
                    &x,
                    config.truth,
                    config.noise_sd,
                    config.realizations,
                    config.seed,
                )
            });
            match errors {
                Ok(e) => stats.push((n, mean_and_std(&e))),
                Err(e) => table.diagnostics.push(format!(
                    "baseline nu={} n={n}: {e}",
                    params.nu + BASELINE_NU_SHIFT
                )),
            }
        }
        for &n_fe in &config.n_fe {
            for &(n, (mean_l2, std_l2)) in &stats {
                table.rows.push(RateRow {
                    params: *params,
                    n_fe,
                    n,
                    mean_l2,
                    std_l2,
                });
            }
            table.push_series(*params, n_fe, config.fit_skip);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::Observations;

    #[test]
    fn baseline_uses_smoother_kernel() {
        let p = baseline_params(0.5, 1.0, 1.0).unwrap();
        assert_eq!((p.nu, p.lengthscale, p.variance), (2.5, 1.0, 1.0));
        assert!(baseline_params(1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn baseline_interpolates_clean_data() {
        let xs = [0.2, 0.4, 0.6, 0.8];
        let ys: Vec<f64> = xs.iter().map(|x| x * (1.0 - x)).collect();
        let obs = Observations::from_1d(&xs, ys.clone(), 1e-6).unwrap();
        let post = matern_baseline(&obs, 0.5, 1.0, 1.0).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((post.mean1(*x) - y).abs() < 1e-6);
        }
    }
}
