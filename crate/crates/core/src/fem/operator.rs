use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A coefficient function on `(0, 1)`.
pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const SAMPLE_POINTS: usize = 1025;

/// `L u = -(a u')' + b u' + c u` on `(0, 1)`.
#[derive(Clone)]
pub struct Operator1D {
    pub(crate) diffusion: Coefficient,
    pub(crate) advection: Coefficient,
    pub(crate) reaction: Coefficient,
    label: String,
}

impl fmt::Debug for Operator1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator1D").field("label", &self.label).finish()
    }
}

fn sample_grid() -> impl Iterator<Item = f64> {
    (1..=SAMPLE_POINTS).map(|i| i as f64 / (SAMPLE_POINTS + 1) as f64)
}

impl Operator1D {
    /// Checks uniform ellipticity `a ≥ λ > 0` on a sampled grid.
    pub fn new(diffusion: Coefficient, advection: Coefficient, reaction: Coefficient) -> Result<Self> {
        Self::labelled(diffusion, advection, reaction, "custom".into())
    }

    fn labelled(
        diffusion: Coefficient,
        advection: Coefficient,
        reaction: Coefficient,
        label: String,
    ) -> Result<Self> {
        let lambda = sample_grid().map(|x| diffusion(x)).fold(f64::INFINITY, f64::min);
        if !(lambda > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "operator is not uniformly elliptic: min a(x) = {lambda} on the sample grid"
            )));
        }
        Ok(Self {
            diffusion,
            advection,
            reaction,
            label,
        })
    }

    /// `-u''`.
    pub fn poisson() -> Self {
        Self::constant(1.0, 0.0, 0.0).expect("Poisson operator is elliptic")
    }

    pub fn constant(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::labelled(
            Arc::new(move |_| a),
            Arc::new(move |_| b),
            Arc::new(move |_| c),
            format!("constant(a={a}, b={b}, c={c})"),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn diffusion(&self, x: f64) -> f64 {
        (self.diffusion)(x)
    }

    pub fn advection(&self, x: f64) -> f64 {
        (self.advection)(x)
    }

    pub fn reaction(&self, x: f64) -> f64 {
        (self.reaction)(x)
    }

    /// The error bounds for the posterior mean assume `c ≤ 0`.
    pub fn check_rate_conditions(&self) -> Result<()> {
        match sample_grid().find(|&x| self.reaction(x) > 0.0) {
            Some(x) => Err(Error::InvalidParameter(format!(
                "rate bounds require c <= 0, but c({x}) = {}",
                self.reaction(x)
            ))),
            None => Ok(()),
        }
    }
}
