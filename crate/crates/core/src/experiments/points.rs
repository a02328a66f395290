use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointGenerator {
    Uniform,
    RandomUniform,
}

/// Sorted, distinct observation locations in `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<f64>,
    generator: PointGenerator,
}

impl PointSet {
    pub fn new(mut points: Vec<f64>, generator: PointGenerator) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("a point set cannot be empty".into()));
        }
        points.sort_by(f64::total_cmp);
        if points.iter().any(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(Error::OutOfDomain("points must lie in (0, 1)".into()));
        }
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("points must be distinct".into()));
        }
        Ok(Self { points, generator })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn generator(&self) -> PointGenerator {
        self.generator
    }

    /// Points as one-dimensional coordinate vectors.
    pub fn as_coords(&self) -> Vec<Vec<f64>> {
        self.points.iter().map(|&x| vec![x]).collect()
    }
}

/// `x_i = i / (n + 1)` for `i = 1..=n`.
pub fn uniform_points(n: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    let step = (n + 1) as f64;
    PointSet::new(
        (1..=n).map(|i| i as f64 / step).collect(),
        PointGenerator::Uniform,
    )
}

/// `n` independent uniform draws on `(0, 1)`, redrawn on collisions.
pub fn random_uniform_points<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one point".into()));
    }
    let mut pts: Vec<f64> = Vec::with_capacity(n);
    while pts.len() < n {
        let x: f64 = rng.gen();
        if x > 0.0 && !pts.contains(&x) {
            pts.push(x);
        }
    }
    PointSet::new(pts, PointGenerator::RandomUniform)
}

/// Fill distance, separation radius and their ratio for a point set in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FillMetrics {
    /// `sup_{x ∈ (0,1)} min_i |x − x_i|`.
    pub fill_distance: f64,
    /// Half the smallest gap between points; `+∞` for a single point.
    pub separation: f64,
    /// `fill_distance / separation`; `None` when the separation is undefined.
    pub mesh_ratio: Option<f64>,
}

pub fn fill_metrics(set: &PointSet) -> FillMetrics {
    let x = set.points();
    let first = x[0];
    let last = 1.0 - x[x.len() - 1];
    let half_gap = x
        .windows(2)
        .map(|w| 0.5 * (w[1] - w[0]))
        .fold(0.0, f64::max);
    let fill_distance = first.max(last).max(half_gap);
    if x.len() < 2 {
        return FillMetrics {
            fill_distance,
            separation: f64::INFINITY,
            mesh_ratio: None,
        };
    }
    let separation = x
        .windows(2)
        .map(|w| 0.5 * (w[1] - w[0]))
        .fold(f64::INFINITY, f64::min);
    FillMetrics {
        fill_distance,
        separation,
        mesh_ratio: Some(fill_distance / separation),
    }
}
