use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gp::{Conditioner, ZeroMean};
use crate::kernels::{Kernel, Matern, MaternParams};
use crate::linalg::dot;

pub const PROP6_GRID_SIZE: usize = 1024;

/// Both sides of the kernel perturbation bound
/// `sup_x |m¹(x) − m²(x)| ≤ ‖Z‖₂ (δ + C σ⁻²) σ⁻² δ n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop6Report {
    /// `max |R₁ − R₂|` over pairs of grid and data points.
    pub delta: f64,
    /// `max |R₂|` over the same pairs.
    pub c: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Grid point attaining `lhs`.
    pub witness_x: f64,
    pub grid_size: usize,
    pub holds: bool,
}

/// `grid_size` equispaced points on `[0, 1]`, endpoints included.
pub fn unit_grid(grid_size: usize) -> Vec<f64> {
    match grid_size {
        0 => Vec::new(),
        1 => vec![0.5],
        g => (0..g).map(|i| i as f64 / (g - 1) as f64).collect(),
    }
}

/// Evaluates both sides of the bound for zero-mean regression of `z` at `x`.
///
/// The suprema in `δ` and `C` are taken over all pairs from the grid together
/// with the data locations, the supremum on the left over the grid alone.
pub fn prop6_check(
    r1: Arc<dyn Kernel>,
    r2: Arc<dyn Kernel>,
    x: &[f64],
    z: &[f64],
    sigma: f64,
    grid: &[f64],
) -> Result<Prop6Report> {
    if x.len() != z.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: z.len(),
        });
    }
    if grid.is_empty() {
        return Err(Error::InvalidParameter("prop6 grid must not be empty".into()));
    }
    let coords: Vec<Vec<f64>> = x.iter().map(|&p| vec![p]).collect();
    let c1 = Conditioner::new(Arc::new(ZeroMean), r1.clone(), coords.clone(), sigma)?;
    let c2 = Conditioner::new(Arc::new(ZeroMean), r2.clone(), coords, sigma)?;
    let w1 = c1.weights(z)?;
    let w2 = c2.weights(z)?;

    let (mut lhs, mut witness_x) = (0.0f64, grid[0]);
    for &g in grid {
        let d = (dot(&c1.cross_cov(&[g]), &w1) - dot(&c2.cross_cov(&[g]), &w2)).abs();
        if d > lhs {
            lhs = d;
            witness_x = g;
        }
    }

    let pts: Vec<f64> = grid.iter().chain(x).copied().collect();
    let (mut delta, mut c) = (0.0f64, 0.0f64);
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i..] {
            let k2 = r2.eval1(a, b);
            delta = delta.max((r1.eval1(a, b) - k2).abs());
            c = c.max(k2.abs());
        }
    }

    let n = x.len() as f64;
    let s2 = sigma * sigma;
    let z_norm = dot(z, z).sqrt();
    let rhs = z_norm * (delta + c / s2) / s2 * delta * n;
    Ok(Prop6Report {
        delta,
        c,
        lhs,
        rhs,
        witness_x,
        grid_size: grid.len(),
        holds: lhs <= rhs + 1e-12,
    })
}

/// One randomized instance: two Matérn kernels, up to `max_n` random locations,
/// standard normal data and a log-uniform noise level in `[10⁻³, 1]`.
pub fn random_trial<R: Rng + ?Sized>(
    rng: &mut R,
    max_n: usize,
    grid: &[f64],
) -> Result<(Prop6Report, [MaternParams; 2])> {
    let mut params = || {
        MaternParams::new(
            rng.gen_range(0..4) as f64 + 0.5,
            rng.gen_range(0.1..2.0),
            rng.gen_range(0.1..10.0),
        )
    };
    let (p1, p2) = (params()?, params()?);
    let n = rng.gen_range(1..=max_n);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let z: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let sigma = 10f64.powf(rng.gen_range(-3.0..0.0));
    let report = prop6_check(
        Arc::new(Matern::new(p1, 1)?),
        Arc::new(Matern::new(p2, 1)?),
        &x,
        &z,
        sigma,
        grid,
    )?;
    Ok((report, [p1, p2]))
}
