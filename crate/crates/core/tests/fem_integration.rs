use std::f64::consts::PI;

use statfem::fem::{
    assemble_load, assemble_m, assemble_stiffness, fem_solve, induced_prior, MMode, Mesh1D,
    Operator1D,
};
use statfem::kernels::Matern;
use statfem::oracle::{oracle_ku, oracle_mu};

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (l, r) = (simpson(f, a, m), simpson(f, m, b));
        if depth == 0 || (l + r - whole).abs() <= 15.0 * tol {
            l + r + (l + r - whole) / 15.0
        } else {
            rec(f, a, m, l, tol / 2.0, depth - 1) + rec(f, m, b, r, tol / 2.0, depth - 1)
        }
    }
    rec(f, a, b, simpson(f, a, b), tol, 50)
}

#[test]
fn load_vector_matches_adaptive_quadrature() {
    let mesh = Mesh1D::uniform(40).unwrap();
    let f = |x: f64| (PI * x).sin();
    let mu = assemble_load(&f, &mesh);
    for (i, got) in mu.iter().enumerate() {
        let nodes = mesh.nodes();
        let want = adaptive_simpson(&|x| f(x) * mesh.hat(i, x), nodes[i], nodes[i + 1], 1e-16)
            + adaptive_simpson(&|x| f(x) * mesh.hat(i, x), nodes[i + 1], nodes[i + 2], 1e-16);
        assert!((got - want).abs() <= 1e-10 * want.abs(), "i={i} {got} vs {want}");
    }
}

#[test]
fn galerkin_solution_is_nodally_exact_for_poisson() {
    let mesh = Mesh1D::uniform(16).unwrap();
    let f = |x: f64| (3.0 * x).exp();
    let u = fem_solve(&Operator1D::poisson(), &mesh, &f).unwrap();
    for &x in mesh.interior_nodes() {
        let want = oracle_mu(&f, x).unwrap();
        assert!((u.eval(x) - want).abs() < 1e-12 * want.abs().max(1.0), "x={x}");
    }
}

#[test]
fn nonuniform_mesh_converges() {
    let f = |x: f64| (PI * x).sin();
    let err = |n: usize| {
        let interior: Vec<f64> = (1..=n)
            .map(|i| {
                let t = i as f64 / (n + 1) as f64;
                t * t * (3.0 - 2.0 * t)
            })
            .collect();
        let mesh = Mesh1D::from_interior(&interior).unwrap();
        let u = fem_solve(&Operator1D::poisson(), &mesh, &f).unwrap();
        (0..=1000)
            .map(|i| i as f64 / 1000.0)
            .map(|x| (u.eval(x) - f(x) / (PI * PI)).abs())
            .fold(0.0, f64::max)
    };
    let ratio = err(32) / err(64);
    assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
}

#[test]
fn induced_kernel_matches_oracle_at_a_point() {
    let k = Matern::new_1d(0.5, 1.0, 1.0).unwrap();
    let p = induced_prior(&Operator1D::poisson(), &Mesh1D::uniform(256).unwrap(), &k, &|_| 0.0, MMode::Exact)
        .unwrap();
    let want = oracle_ku(&k, 0.3, 0.6).unwrap();
    assert!((p.cov(0.3, 0.6) - want).abs() <= 1e-3 * want);
}

#[test]
fn exact_and_lumped_priors_agree_as_mesh_refines() {
    let k = Matern::new_1d(1.5, 0.5, 1.0).unwrap();
    let gap = |n: usize| {
        let mesh = Mesh1D::uniform(n).unwrap();
        let e = induced_prior(&Operator1D::poisson(), &mesh, &k, &|_| 0.0, MMode::Exact).unwrap();
        let l = induced_prior(&Operator1D::poisson(), &mesh, &k, &|_| 0.0, MMode::Lumped).unwrap();
        (e.coeff_cov() - l.coeff_cov()).abs().max()
    };
    assert!(gap(64) < gap(32) / 3.0);
}

#[test]
fn mass_matrices_are_symmetric() {
    let k = Matern::new_1d(2.5, 0.3, 4.0).unwrap();
    let mesh = Mesh1D::uniform(20).unwrap();
    for mode in [MMode::Exact, MMode::Lumped] {
        let m = assemble_m(&k, &mesh, mode).unwrap();
        assert_eq!(m, m.transpose());
    }
}

#[test]
fn advection_makes_stiffness_nonsymmetric_but_solvable() {
    let op = Operator1D::constant(1.0, 5.0, 0.0).unwrap();
    let mesh = Mesh1D::uniform(200).unwrap();
    let a = assemble_stiffness(&op, &mesh).unwrap();
    assert!(!a.matrix().is_symmetric());
    // -u'' + 5u' = 1 with zero boundary values.
    let exact = |x: f64| (x - ((5.0 * x).exp() - 1.0) / (5f64.exp() - 1.0)) / 5.0;
    let u = fem_solve(&op, &mesh, &|_| 1.0).unwrap();
    for x in [0.1, 0.5, 0.9] {
        assert!((u.eval(x) - exact(x)).abs() < 1e-4);
    }
}
