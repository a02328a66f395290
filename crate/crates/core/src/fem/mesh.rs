use crate::error::{Error, Result};

/// A partition `0 = x_0 < x_1 < … < x_{n+1} = 1` carrying `n` interior hat functions.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    // Includes both boundary nodes.
    nodes: Vec<f64>,
    uniform: bool,
}

impl Mesh1D {
    /// `n_fe` equally spaced interior nodes `i / (n_fe + 1)`.
    pub fn uniform(n_fe: usize) -> Result<Self> {
        if n_fe == 0 {
            return Err(Error::InvalidParameter(
                "a mesh needs at least one interior node".into(),
            ));
        }
        let h = 1.0 / (n_fe + 1) as f64;
        let mut nodes: Vec<f64> = (0..=n_fe + 1).map(|i| i as f64 * h).collect();
        nodes[n_fe + 1] = 1.0;
        Ok(Self {
            nodes,
            uniform: true,
        })
    }

    /// Builds a mesh from strictly increasing interior nodes in `(0, 1)`.
    pub fn from_interior(interior: &[f64]) -> Result<Self> {
        if interior.is_empty() {
            return Err(Error::InvalidParameter(
                "a mesh needs at least one interior node".into(),
            ));
        }
        let mut nodes = Vec::with_capacity(interior.len() + 2);
        nodes.push(0.0);
        nodes.extend_from_slice(interior);
        nodes.push(1.0);
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "mesh nodes must be strictly increasing and lie in (0, 1)".into(),
            ));
        }
        Ok(Self {
            nodes,
            uniform: false,
        })
    }

    /// Number of interior nodes, i.e. of basis functions.
    pub fn n_fe(&self) -> usize {
        self.nodes.len() - 2
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    /// All nodes including the two boundary nodes.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn interior_nodes(&self) -> &[f64] {
        &self.nodes[1..self.nodes.len() - 1]
    }

    /// Endpoints of element `e`.
    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    pub fn max_width(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// `∫ φ_i` for interior basis function `i` (zero-based).
    pub fn hat_integral(&self, i: usize) -> f64 {
        0.5 * (self.nodes[i + 2] - self.nodes[i])
    }

    /// Element containing `x`, or `None` outside `[0, 1]`.
    pub fn locate(&self, x: f64) -> Option<usize> {
        if !(0.0..=1.0).contains(&x) {
            return None;
        }
        let last = self.element_count() - 1;
        let e = if self.uniform {
            ((x * self.element_count() as f64) as usize).min(last)
        } else {
            self.nodes.partition_point(|&v| v <= x).saturating_sub(1).min(last)
        };
        // Rounding in the uniform shortcut can land one element off.
        if x < self.nodes[e] {
            Some(e - 1)
        } else if x > self.nodes[e + 1] {
            Some(e + 1)
        } else {
            Some(e)
        }
    }

    /// Nonzero interior basis values at `x` as `(index, value)` pairs. Entries
    /// that belong to boundary nodes are reported as `None`.
    pub fn basis_values(&self, x: f64) -> [Option<(usize, f64)>; 2] {
        let Some(e) = self.locate(x) else {
            return [None, None];
        };
        let (a, b) = self.element(e);
        let h = b - a;
        let right = (x - a) / h;
        let left = (b - x) / h;
        let n = self.n_fe();
        // Full node e is interior index e - 1.
        let l = (e >= 1).then(|| (e - 1, left));
        let r = (e < n).then(|| (e, right));
        [l, r]
    }

    /// Value of interior hat function `i` at `x`.
    pub fn hat(&self, i: usize, x: f64) -> f64 {
        self.basis_values(x)
            .into_iter()
            .flatten()
            .find(|(j, _)| *j == i)
            .map_or(0.0, |(_, v)| v)
    }

    /// Evaluates `Σ c_i φ_i(x)`.
    pub fn interpolate(&self, coeffs: &[f64], x: f64) -> f64 {
        self.basis_values(x)
            .into_iter()
            .flatten()
            .map(|(i, v)| v * coeffs[i])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh_layout() {
        let m = Mesh1D::uniform(3).unwrap();
        assert_eq!(m.nodes(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(m.n_fe(), 3);
        assert!((m.hat_integral(1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hats_are_nodal() {
        let m = Mesh1D::from_interior(&[0.1, 0.35, 0.4, 0.8]).unwrap();
        for (i, &xi) in m.interior_nodes().iter().enumerate() {
            for (j, &xj) in m.interior_nodes().iter().enumerate() {
                let v = m.hat(i, xj);
                assert_eq!(v, if i == j { 1.0 } else { 0.0 }, "i={i} j={j}");
            }
            assert_eq!(m.hat(i, 0.0), 0.0);
            assert_eq!(m.hat(i, 1.0), 0.0);
            assert!(m.hat(i, xi) == 1.0);
        }
        // Supported on the two adjacent elements only.
        assert_eq!(m.hat(1, 0.05), 0.0);
        assert!((m.hat(1, 0.375) - 0.5).abs() < 1e-12);
        assert_eq!(m.hat(1, 0.6), 0.0);
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(Mesh1D::from_interior(&[0.5, 0.4]).is_err());
        assert!(Mesh1D::from_interior(&[0.0, 0.4]).is_err());
        assert!(Mesh1D::from_interior(&[0.4, 1.0]).is_err());
        assert!(Mesh1D::from_interior(&[0.4, 0.4]).is_err());
        assert!(Mesh1D::from_interior(&[]).is_err());
        assert!(Mesh1D::uniform(0).is_err());
    }

    #[test]
    fn locate_agrees_with_search_on_uniform_mesh() {
        let m = Mesh1D::uniform(1023).unwrap();
        for k in 0..=5000 {
            let x = k as f64 / 5000.0;
            let e = m.locate(x).unwrap();
            let (a, b) = m.element(e);
            assert!(a <= x && x <= b);
        }
        assert_eq!(m.locate(-1e-9), None);
        assert_eq!(m.locate(1.0 + 1e-9), None);
    }
}
