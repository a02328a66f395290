use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::PointSet;
use crate::error::Result;
use crate::gp::Observations;
use crate::quadrature::GaussLegendre;

/// `y_i = u_t(x_i) + σ z_i` with i.i.d. standard normal `z_i` drawn from `rng`.
pub fn simulate_data<F, R>(u_t: &F, x: &PointSet, noise_sd: f64, rng: &mut R) -> Result<Observations>
where
    F: Fn(f64) -> f64 + ?Sized,
    R: Rng + ?Sized,
{
    let values = x
        .points()
        .iter()
        .map(|&p| {
            let z: f64 = rng.sample(StandardNormal);
            u_t(p) + noise_sd * z
        })
        .collect();
    Observations::from_1d(x.points(), values, noise_sd)
}

/// Independent stream for one `(n, realization)` pair under a base seed.
///
/// ChaCha is counter based, so selecting a stream is a constant-time jump and
/// draws do not depend on how realizations are scheduled across threads.
pub fn substream(seed: u64, n: usize, realization: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((n as u64) << 32) | realization as u64);
    rng
}

/// Panels of the composite rule used for `L²` errors.
pub const L2_PANELS: usize = 512;
const L2_RULE_POINTS: usize = 4;

/// Fixed composite Gauss–Legendre rule on `(0, 1)` for squared `L²` norms.
#[derive(Debug, Clone)]
pub struct L2Quadrature {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for L2Quadrature {
    fn default() -> Self {
        Self::new(L2_PANELS)
    }
}

impl L2Quadrature {
    pub fn new(panels: usize) -> Self {
        let rule = GaussLegendre::new(L2_RULE_POINTS);
        let width = 1.0 / panels as f64;
        let (points, weights) = (0..panels)
            .flat_map(|p| {
                let a = p as f64 * width;
                rule.mapped(a, a + width).collect::<Vec<_>>()
            })
            .unzip();
        Self { points, weights }
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `‖g‖_{L²}` from the values of `g` at [`L2Quadrature::points`].
    pub fn norm_from_values(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.weights
            .iter()
            .zip(values)
            .map(|(w, v)| w * v * v)
            .sum::<f64>()
            .sqrt()
    }
}

/// `‖u_t − m̂‖_{L²(0,1)}` by composite Gauss–Legendre quadrature on 512 panels.
pub fn l2_error<F, G>(u_t: &F, estimate: &G) -> f64
where
    F: Fn(f64) -> f64 + ?Sized,
    G: Fn(f64) -> f64 + ?Sized,
{
    let q = L2Quadrature::default();
    q.norm_from_values(q.points().iter().map(|&x| u_t(x) - estimate(x)))
}
