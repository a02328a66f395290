use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::convergence::fit_loglog_slope;
use super::prop6::{random_trial, unit_grid, PROP6_GRID_SIZE};
use crate::error::Result;
use crate::fem::{fem_solve, induced_prior, MMode, Mesh1D, Operator1D};
use crate::kernels::{gram, kernel_sum, Kernel, Matern, MaternParams};
use crate::linalg::max_abs_diagonal;
use crate::oracle::oracle_ku;

pub const FE_RATE_N: [usize; 5] = [64, 128, 256, 512, 1024];
pub const FE_RATE_BAND: (f64, f64) = (-2.3, -1.8);
pub const ORACLE_N: [usize; 3] = [128, 256, 512];
/// Off-node agreement with the oracle at the finest mesh, relative to `max K_u`.
pub const ORACLE_GRID_TOLERANCE: f64 = 1e-3;
/// At mesh nodes the Galerkin solution of `−u'' = f` is exact, so with exact `M`
/// the only error left is the quadrature of `M`. Relative to `max K_u`, it stays
/// below `0.05 h²`; row-sum lumping is an `O(h²)` perturbation with a larger
/// constant and does not.
pub const NODAL_TOLERANCE_H2: f64 = 0.05;
pub const PSD_INSTANCES: usize = 50;
pub const PSD_RELATIVE_TOLERANCE: f64 = 1e-8;
pub const BOUNDARY_TOLERANCE: f64 = 1e-14;
pub const PROP6_TRIALS: usize = 100;
pub const PROP6_MAX_N: usize = 20;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub mode: MMode,
    pub suites: Vec<SuiteResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &SuiteResult> {
        self.suites.iter().filter(|s| !s.passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "M mode: {}", self.mode)?;
        for s in &self.suites {
            writeln!(f, "{} {}", if s.passed { "PASS" } else { "FAIL" }, s.name)?;
            for d in &s.details {
                writeln!(f, "    {d}")?;
            }
        }
        write!(
            f,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

fn suite(name: &'static str, run: impl FnOnce(&mut Vec<String>) -> Result<bool>) -> SuiteResult {
    let mut details = Vec::new();
    let passed = match run(&mut details) {
        Ok(p) => p,
        Err(e) => {
            details.push(format!("error: {e}"));
            false
        }
    };
    SuiteResult {
        name,
        passed,
        details,
    }
}

/// Runs every suite with the mass matrix assembled in `mode`. Tolerances are
/// those of exact mode regardless of `mode`.
pub fn run_verify(mode: MMode, seed: u64) -> VerifyReport {
    VerifyReport {
        mode,
        suites: vec![
            suite("fe-convergence", fe_convergence),
            suite("oracle-equivalence", |d| oracle_equivalence(mode, d)),
            suite("psd", |d| psd(mode, seed, d)),
            suite("boundary-zero", |d| boundary_zero(mode, seed, d)),
            suite("prop6", |d| prop6(seed, d)),
        ],
    }
}

/// Sup-norm error of the finite element solution of `−u'' = sin(πx)`.
pub fn fe_sup_error(n_fe: usize) -> Result<f64> {
    let mesh = Mesh1D::uniform(n_fe)?;
    let u = fem_solve(&Operator1D::poisson(), &mesh, &|x: f64| (PI * x).sin())?;
    let mut err = 0.0f64;
    for e in 0..mesh.element_count() {
        let (a, b) = mesh.element(e);
        for k in 0..=8 {
            let x = a + (b - a) * k as f64 / 8.0;
            err = err.max((u.eval(x) - (PI * x).sin() / (PI * PI)).abs());
        }
    }
    Ok(err)
}

fn fe_convergence(d: &mut Vec<String>) -> Result<bool> {
    let errs = FE_RATE_N
        .iter()
        .map(|&n| fe_sup_error(n))
        .collect::<Result<Vec<_>>>()?;
    for (n, e) in FE_RATE_N.iter().zip(&errs) {
        d.push(format!("n_fe={n} sup_error={e:.4e}"));
    }
    let x: Vec<f64> = FE_RATE_N.iter().map(|&n| n as f64).collect();
    let slope = fit_loglog_slope(&x, &errs);
    let ok = slope.is_some_and(|s| (FE_RATE_BAND.0..=FE_RATE_BAND.1).contains(&s));
    d.push(format!(
        "slope={} band=[{}, {}]",
        slope.map_or("n/a".into(), |s| format!("{s:.4}")),
        FE_RATE_BAND.0,
        FE_RATE_BAND.1
    ));
    Ok(ok)
}

fn max_abs_diff(prior: &impl Kernel, pts: &[f64], reference: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate() {
            worst = worst.max((prior.eval1(x, y) - reference[i * pts.len() + j]).abs());
        }
    }
    worst
}

fn oracle_table<K: Kernel>(k: &K, pts: &[f64]) -> Result<Vec<f64>> {
    let mut v = Vec::with_capacity(pts.len() * pts.len());
    for &x in pts {
        for &y in pts {
            v.push(oracle_ku(k, x, y)?);
        }
    }
    Ok(v)
}

fn oracle_equivalence(mode: MMode, d: &mut Vec<String>) -> Result<bool> {
    let k = Matern::new_1d(0.5, 1.0, 1.0)?;
    let op = Operator1D::poisson();
    let grid: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    let reference = oracle_table(&k, &grid)?;
    let scale = reference.iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut ok = true;
    let mut grid_errs = Vec::new();
    for &n in &ORACLE_N {
        let mesh = Mesh1D::uniform(n)?;
        let prior = induced_prior(&op, &mesh, &k, &|_| 0.0, mode)?;
        let grid_err = max_abs_diff(&prior, &grid, &reference) / scale;

        let h = mesh.max_width();
        let nodes: Vec<f64> = grid
            .iter()
            .map(|&x| mesh.nodes()[(x / h).round() as usize])
            .collect();
        let nodal_err = max_abs_diff(&prior, &nodes, &oracle_table(&k, &nodes)?) / scale;
        let nodal_tol = NODAL_TOLERANCE_H2 * h * h;
        ok &= nodal_err <= nodal_tol;
        d.push(format!(
            "n_fe={n} grid_rel_error={grid_err:.4e} nodal_rel_error={nodal_err:.4e} nodal_tolerance={nodal_tol:.4e}"
        ));
        grid_errs.push(grid_err);
    }
    let decreasing = grid_errs.windows(2).all(|w| w[1] < w[0]);
    let last = *grid_errs.last().unwrap_or(&f64::INFINITY);
    ok &= decreasing && last <= ORACLE_GRID_TOLERANCE;
    d.push(format!(
        "grid error decreasing={decreasing}, final {last:.4e} vs tolerance {ORACLE_GRID_TOLERANCE:e}"
    ));
    Ok(ok)
}

fn random_params<R: Rng>(rng: &mut R) -> Result<MaternParams> {
    MaternParams::new(
        rng.gen_range(0..4) as f64 + 0.5,
        rng.gen_range(0.1..2.0),
        rng.gen_range(0.1..100.0),
    )
}

fn psd(mode: MMode, seed: u64, d: &mut Vec<String>) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5053_4400);
    let op = Operator1D::poisson();
    let mut worst = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..PSD_INSTANCES {
        let source = Matern::new(random_params(&mut rng)?, 1)?;
        let n_fe = rng.gen_range(8..=128);
        let prior = Arc::new(induced_prior(&op, &Mesh1D::uniform(n_fe)?, &source, &|_| 0.0, mode)?);
        let disc: Arc<dyn Kernel> = Arc::new(Matern::new(random_params(&mut rng)?, 1)?);
        let sum = kernel_sum(prior.clone(), disc.clone())?;
        let n = rng.gen_range(2..=40);
        let pts: Vec<[f64; 1]> = (0..n).map(|_| [rng.gen_range(0.0..1.0)]).collect();
        let grams = [
            gram(&source, &pts)?,
            gram(prior.as_ref(), &pts)?,
            gram(disc.as_ref(), &pts)?,
            gram(&sum, &pts)?,
        ];
        for g in &grams {
            let scale = max_abs_diagonal(&g.entries).max(f64::MIN_POSITIVE);
            let rel = g.min_eigenvalue() / scale;
            worst = worst.min(rel);
            if rel < -PSD_RELATIVE_TOLERANCE {
                failures += 1;
            }
        }
    }
    d.push(format!(
        "{} Gram matrices, worst min_eigenvalue/max_diagonal={worst:.3e}, violations={failures}",
        PSD_INSTANCES * 4
    ));
    Ok(failures == 0)
}

fn boundary_zero(mode: MMode, seed: u64, d: &mut Vec<String>) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x4244_5259);
    let op = Operator1D::poisson();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let source = Matern::new(random_params(&mut rng)?, 1)?;
        let prior = induced_prior(&op, &Mesh1D::uniform(rng.gen_range(4..=256))?, &source, &|_| 0.0, mode)?;
        for _ in 0..20 {
            let y: f64 = rng.gen_range(0.0..=1.0);
            for v in [prior.cov(0.0, y), prior.cov(1.0, y), prior.cov(y, 0.0), prior.cov(y, 1.0)] {
                worst = worst.max(v.abs());
            }
        }
    }
    d.push(format!("max |K_u(boundary, y)|={worst:.3e} tolerance={BOUNDARY_TOLERANCE:e}"));
    Ok(worst <= BOUNDARY_TOLERANCE)
}

fn prop6(seed: u64, d: &mut Vec<String>) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5052_4f50);
    let grid = unit_grid(PROP6_GRID_SIZE);
    let mut violations = 0;
    let mut tightest = 0.0f64;
    for t in 0..PROP6_TRIALS {
        let (r, params) = random_trial(&mut rng, PROP6_MAX_N, &grid)?;
        if r.rhs > 0.0 {
            tightest = tightest.max(r.lhs / r.rhs);
        }
        if !r.holds {
            violations += 1;
            d.push(format!(
                "trial {t} violated: lhs={:.4e} rhs={:.4e} at x={} kernels={params:?}",
                r.lhs, r.rhs, r.witness_x
            ));
        }
    }
    d.push(format!(
        "{PROP6_TRIALS} trials on a {PROP6_GRID_SIZE}-point grid, violations={violations}, max lhs/rhs={tightest:.3e}"
    ));
    Ok(violations == 0)
}
