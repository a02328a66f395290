//! Closed-form Green's function reference for `-u'' = f` on `(0, 1)` with
//! `u(0) = u(1) = 0`.
//!
//! The prior mean and covariance induced on `u` are `m_u(x) = ∫ G(x, x') m(x') dx'`
//! and `K_u(x, y) = ∬ G(x, x') K(x', y') G(y, y') dx' dy'`. Both integrals are
//! evaluated with high-order Gauss–Legendre panels split at the kinks of `G`
//! (and of `K` on the diagonal), which keeps every panel integrand smooth.
//!
//! Only Poisson's equation is covered; other operators are checked against
//! finite element self-convergence instead.

use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::quadrature::GaussLegendre;

const RULE_POINTS: usize = 20;
const PANELS: usize = 4;

fn check_unit(v: f64, name: &str) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::OutOfDomain(format!("{name} = {v} is outside [0, 1]")))
    }
}

fn green(x: f64, y: f64) -> f64 {
    if x <= y {
        x * (1.0 - y)
    } else {
        y * (1.0 - x)
    }
}

/// `G(x, y) = x(1 - y)` for `x ≤ y` and `y(1 - x)` otherwise.
pub fn green_eval(x: f64, y: f64) -> Result<f64> {
    check_unit(x, "x")?;
    check_unit(y, "y")?;
    Ok(green(x, y))
}

/// `m_u(x) = ∫ G(x, x') m(x') dx'`.
pub fn oracle_mu<F: Fn(f64) -> f64 + ?Sized>(m: &F, x: f64) -> Result<f64> {
    check_unit(x, "x")?;
    let rule = GaussLegendre::new(RULE_POINTS);
    Ok(rule.integrate_split(0.0, 1.0, &[x], PANELS * 2, |s| green(x, s) * m(s)))
}

/// `∫ K(s, y') G(y, y') dy'`, the covariance after applying the inverse operator once.
pub fn oracle_half<K: Kernel + ?Sized>(kernel: &K, s: f64, y: f64) -> f64 {
    let rule = GaussLegendre::new(RULE_POINTS);
    rule.integrate_split(0.0, 1.0, &[y, s], PANELS, |t| {
        kernel.eval1(s, t) * green(y, t)
    })
}

/// `K_u(x, y) = ∬ G(x, x') K(x', y') G(y, y') dx' dy'`.
pub fn oracle_ku<K: Kernel + ?Sized>(kernel: &K, x: f64, y: f64) -> Result<f64> {
    check_unit(x, "x")?;
    check_unit(y, "y")?;
    if kernel.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: kernel.dim(),
        });
    }
    if x == 0.0 || x == 1.0 || y == 0.0 || y == 1.0 {
        return Ok(0.0);
    }
    let rule = GaussLegendre::new(RULE_POINTS);
    Ok(rule.integrate_split(0.0, 1.0, &[x, y], PANELS, |s| {
        green(x, s) * oracle_half(kernel, s, y)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{gram, Matern};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn green_values() {
        assert_eq!(green_eval(0.25, 0.75).unwrap(), 0.0625);
        assert_eq!(green_eval(0.75, 0.25).unwrap(), 0.0625);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            assert_eq!(green_eval(0.0, y).unwrap(), 0.0);
            assert_eq!(green_eval(1.0, y).unwrap(), 0.0);
            assert_eq!(green_eval(x, y).unwrap(), green_eval(y, x).unwrap());
            assert!(green_eval(x, y).unwrap() >= 0.0);
        }
        assert!(matches!(green_eval(-0.1, 0.5), Err(Error::OutOfDomain(_))));
        assert!(matches!(green_eval(0.5, 1.5), Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn mean_of_sine_modes_is_exact() {
        for k in 1..=5 {
            let kp = k as f64 * PI;
            for &x in &[0.1, 0.33, 0.5, 0.77, 0.95] {
                let got = oracle_mu(&|s: f64| (kp * s).sin(), x).unwrap();
                let want = (kp * x).sin() / (kp * kp);
                assert!((got - want).abs() < 1e-12, "k={k} x={x}");
            }
        }
        assert_eq!(oracle_mu(&|_| 0.0, 0.4).unwrap(), 0.0);
        assert!((oracle_mu(&|s: f64| (PI * s).sin(), 0.5).unwrap() - 0.101321).abs() < 1e-6);
    }

    #[test]
    fn mean_of_reference_source() {
        let f = |x: f64| PI * PI / 5.0 * (PI * x).sin() + 49.0 * PI * PI / 50.0 * (7.0 * PI * x).sin();
        assert!((oracle_mu(&f, 0.5).unwrap() - 0.18).abs() < 1e-12);
    }

    #[test]
    fn covariance_vanishes_at_boundary_and_is_symmetric() {
        let k = Matern::new_1d(0.5, 1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let (x, y): (f64, f64) = (rng.gen(), rng.gen());
            assert_eq!(oracle_ku(&k, 0.0, y).unwrap(), 0.0);
            let a = oracle_ku(&k, x, y).unwrap();
            let b = oracle_ku(&k, y, x).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_kernel_has_closed_form() {
        // K ≡ 1 gives K_u(x, y) = w(x) w(y) with w(x) = x(1 - x)/2.
        let k = crate::kernels::ConstantKernel { dim: 1, value: 1.0 };
        for &(x, y) in &[(0.2, 0.7), (0.5, 0.5), (0.9, 0.1)] {
            let want = x * (1.0 - x) / 2.0 * y * (1.0 - y) / 2.0;
            assert!((oracle_ku(&k, x, y).unwrap() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn oracle_gram_is_psd() {
        let k = Matern::new_1d(1.5, 0.5, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<f64> = (0..6).map(|_| rng.gen()).collect();
        let kernel = OracleKernel(&k);
        let pts1: Vec<[f64; 1]> = pts.iter().map(|&p| [p]).collect();
        assert!(gram(&kernel, &pts1).unwrap().is_psd());
    }

    struct OracleKernel<'a>(&'a Matern);

    impl Kernel for OracleKernel<'_> {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
            oracle_ku(self.0, x[0], y[0]).unwrap()
        }
    }

    #[test]
    fn one_operator_application_recovers_half_kernel() {
        // -∂²ₓ K_u(x, y) = ∫ K(x, y') G(y, y') dy'
        let k = Matern::new_1d(0.5, 1.0, 1.0).unwrap();
        let h = 1e-3;
        for &(x, y) in &[(0.3, 0.6), (0.45, 0.2), (0.7, 0.7)] {
            let fd = -(oracle_ku(&k, x + h, y).unwrap() - 2.0 * oracle_ku(&k, x, y).unwrap()
                + oracle_ku(&k, x - h, y).unwrap())
                / (h * h);
            let want = oracle_half(&k, x, y);
            assert!((fd - want).abs() < 1e-6 * want.abs().max(1.0), "{fd} vs {want}");
        }
    }

    #[test]
    fn out_of_domain_covariance() {
        let k = Matern::new_1d(0.5, 1.0, 1.0).unwrap();
        assert!(oracle_ku(&k, 1.2, 0.5).is_err());
        assert!(oracle_mu(&|_| 1.0, -0.2).is_err());
    }
}
