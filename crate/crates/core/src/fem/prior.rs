use std::sync::Arc;

use nalgebra::DMatrix;

use super::assembly::symmetrize;
use super::{assemble_load, assemble_m, assemble_stiffness, MMode, Mesh1D, Operator1D};
use crate::error::Result;
use crate::kernels::Kernel;

/// The finite element approximation of the Gaussian process prior induced on
/// the solution of `L u = f` by a prior `GP(m, K)` on `f`:
///
/// * `m_u(x) = φ(x)ᵀ A⁻¹ μ` with `μ_i = ∫ m φ_i`,
/// * `K_u(x, y) = φ(x)ᵀ A⁻¹ M A⁻ᵀ φ(y)`.
///
/// For symmetric `A` (no advection) `A⁻ᵀ = A⁻¹`. The coefficient covariance
/// `A⁻¹ M A⁻ᵀ` is precomputed, so each evaluation touches at most four entries.
#[derive(Debug, Clone)]
pub struct InducedPrior {
    mesh: Arc<Mesh1D>,
    mean_coeffs: Arc<Vec<f64>>,
    coeff_cov: Arc<DMatrix<f64>>,
    mode: MMode,
}

impl InducedPrior {
    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn mode(&self) -> MMode {
        self.mode
    }

    /// `A⁻¹ μ`.
    pub fn mean_coeffs(&self) -> &[f64] {
        &self.mean_coeffs
    }

    /// `A⁻¹ M A⁻ᵀ`.
    pub fn coeff_cov(&self) -> &DMatrix<f64> {
        &self.coeff_cov
    }

    pub fn mean(&self, x: f64) -> f64 {
        self.mesh.interpolate(&self.mean_coeffs, x)
    }

    pub fn cov(&self, x: f64, y: f64) -> f64 {
        let bx = self.mesh.basis_values(x);
        let by = self.mesh.basis_values(y);
        let mut s = 0.0;
        for &(i, vi) in bx.iter().flatten() {
            for &(j, vj) in by.iter().flatten() {
                s += vi * self.coeff_cov[(i, j)] * vj;
            }
        }
        s
    }

    pub fn variance(&self, x: f64) -> f64 {
        self.cov(x, x)
    }
}

impl Kernel for InducedPrior {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        self.cov(x[0], y[0])
    }
}

/// Assembles `A`, `μ` and `M` for the source prior `GP(mean, kernel)` and
/// returns the induced prior on the solution.
pub fn induced_prior<K, F>(
    op: &Operator1D,
    mesh: &Mesh1D,
    kernel: &K,
    mean: &F,
    mode: MMode,
) -> Result<InducedPrior>
where
    K: Kernel + ?Sized,
    F: Fn(f64) -> f64 + ?Sized,
{
    let a = assemble_stiffness(op, mesh)?;
    let m = assemble_m(kernel, mesh, mode)?;
    let n = mesh.n_fe();

    let mean_coeffs = a.solve(&assemble_load(mean, mesh));

    // W = A⁻¹ M, column by column.
    let mut w = m;
    for j in 0..n {
        a.solve_in_place(w.column_mut(j).as_mut_slice());
    }
    // C = W A⁻ᵀ = (A⁻¹ Wᵀ)ᵀ.
    let mut c = w.transpose();
    for j in 0..n {
        a.solve_in_place(c.column_mut(j).as_mut_slice());
    }
    c.transpose_mut();
    symmetrize(&mut c);

    Ok(InducedPrior {
        mesh: Arc::new(mesh.clone()),
        mean_coeffs: Arc::new(mean_coeffs),
        coeff_cov: Arc::new(c),
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::Matern;
    use crate::linalg;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn prior(n: usize, mode: MMode) -> InducedPrior {
        let k = Matern::new_1d(0.5, 1.0, 1.0).unwrap();
        induced_prior(&Operator1D::poisson(), &Mesh1D::uniform(n).unwrap(), &k, &|_| 0.0, mode)
            .unwrap()
    }

    #[test]
    fn zero_source_mean_gives_zero_prior_mean() {
        let p = prior(32, MMode::Lumped);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(p.mean(rng.gen()), 0.0);
        }
    }

    #[test]
    fn covariance_vanishes_on_the_boundary() {
        let p = prior(32, MMode::Exact);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let y: f64 = rng.gen();
            assert_eq!(p.cov(0.0, y), 0.0);
            assert_eq!(p.cov(y, 1.0), 0.0);
        }
    }

    #[test]
    fn covariance_is_symmetric_and_psd() {
        let p = prior(64, MMode::Exact);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<[f64; 1]> = (0..25).map(|_| [rng.gen::<f64>()]).collect();
        for a in &pts {
            for b in &pts {
                let (u, v) = (p.cov(a[0], b[0]), p.cov(b[0], a[0]));
                assert!((u - v).abs() <= 1e-12 * u.abs().max(v.abs()));
            }
        }
        let g = crate::kernels::gram(&p, &pts).unwrap();
        assert!(g.is_psd());
    }

    #[test]
    fn nonsymmetric_operator_still_gives_symmetric_covariance() {
        let k = Matern::new_1d(1.5, 0.5, 1.0).unwrap();
        let op = Operator1D::constant(1.0, 3.0, -1.0).unwrap();
        let p = induced_prior(&op, &Mesh1D::uniform(50).unwrap(), &k, &|x| x, MMode::Exact).unwrap();
        let c = p.coeff_cov();
        assert_eq!(c, &c.transpose());
        assert!(linalg::is_psd(c));
        // Mean coefficients solve A c = μ.
        let a = assemble_stiffness(&op, p.mesh()).unwrap();
        let mu = assemble_load(&|x: f64| x, p.mesh());
        let back = a.matrix().to_dense() * linalg::to_dvector(p.mean_coeffs());
        for (x, y) in back.iter().zip(&mu) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_of_sine_source_matches_solution() {
        let k = Matern::new_1d(0.5, 1.0, 1.0).unwrap();
        let pi = std::f64::consts::PI;
        let p = induced_prior(
            &Operator1D::poisson(),
            &Mesh1D::uniform(255).unwrap(),
            &k,
            &|x: f64| (pi * x).sin(),
            MMode::Lumped,
        )
        .unwrap();
        assert!((p.mean(0.5) - 1.0 / (pi * pi)).abs() < 5.0 / 256.0f64.powi(2));
    }
}
