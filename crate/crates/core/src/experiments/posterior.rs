use std::fmt::Write as _;
use std::sync::Arc;

use super::convergence::ExperimentConfig;
use super::data::{simulate_data, substream};
use super::points::uniform_points;
use crate::error::Result;
use crate::fem::{induced_prior, Mesh1D};
use crate::gp::{condition, Observations, ZeroMean};
use crate::kernels::{Matern, MaternParams};

pub const POSTERIOR_GRID: usize = 201;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorRow {
    pub x: f64,
    pub mean: f64,
    /// Posterior standard deviation; negative roundoff variances report as zero.
    pub sd: f64,
    pub truth: f64,
}

#[derive(Debug, Clone)]
pub struct PosteriorSnapshot {
    pub rows: Vec<PosteriorRow>,
    pub observations: Observations,
}

impl PosteriorSnapshot {
    pub fn posterior_csv(&self) -> String {
        let mut out = String::from("x,mean,sd,truth\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.x, r.mean, r.sd, r.truth);
        }
        out
    }

    pub fn observations_csv(&self) -> String {
        let mut out = String::from("x,y\n");
        for (p, y) in self.observations.points().iter().zip(self.observations.values()) {
            let _ = writeln!(out, "{},{}", p[0], y);
        }
        out
    }
}

/// Single-realization statFEM posterior on an equispaced grid of `[0, 1]`,
/// with the data drawn from realization 0 of the study's noise streams.
pub fn posterior_snapshot(
    config: &ExperimentConfig,
    params: MaternParams,
    n_fe: usize,
    n: usize,
) -> Result<PosteriorSnapshot> {
    let op = config.operator.build();
    let source = Matern::new(params, 1)?;
    let prior = induced_prior(&op, &Mesh1D::uniform(n_fe)?, &source, &|_| 0.0, config.mode)?;
    let x = uniform_points(n)?;
    let truth = config.truth;
    let mut rng = substream(config.seed, n, 0);
    let observations = simulate_data(&|t| truth.solution(t), &x, config.noise_sd, &mut rng)?;
    let post = condition(Arc::new(ZeroMean), Arc::new(prior), &observations)?;
    let rows = (0..POSTERIOR_GRID)
        .map(|i| {
            let x = i as f64 / (POSTERIOR_GRID - 1) as f64;
            PosteriorRow {
                x,
                mean: post.mean1(x),
                sd: post.variance(&[x]).max(0.0).sqrt(),
                truth: truth.solution(x),
            }
        })
        .collect();
    Ok(PosteriorSnapshot { rows, observations })
}
