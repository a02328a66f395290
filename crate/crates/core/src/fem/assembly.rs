use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{Mesh1D, Operator1D};
use crate::error::{Error, Result};
use crate::kernels::Kernel;
use crate::linalg::{Tridiagonal, TridiagonalLu};
use crate::quadrature::GaussLegendre;

/// Gauss–Legendre points per element for stiffness, load and exact `M`.
pub const QUADRATURE_POINTS: usize = 4;

/// How the kernel Gram matrix `M` of the basis is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MMode {
    /// Tensor-product quadrature over every pair of elements.
    Exact,
    /// Kernel frozen at the nodes: `M_ij = (∫φ_i) K(x_i, x_j) (∫φ_j)`.
    #[default]
    Lumped,
}

impl fmt::Display for MMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MMode::Exact => "exact",
            MMode::Lumped => "lumped",
        })
    }
}

impl FromStr for MMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(MMode::Exact),
            "lumped" => Ok(MMode::Lumped),
            other => Err(Error::InvalidParameter(format!(
                "unknown M mode {other:?} (expected exact or lumped)"
            ))),
        }
    }
}

/// Quadrature points of one element with both local hat values folded into the weights.
struct ElementRule {
    points: [f64; QUADRATURE_POINTS],
    // w * (b - x) / h and w * (x - a) / h
    left: [f64; QUADRATURE_POINTS],
    right: [f64; QUADRATURE_POINTS],
}

fn element_rules(mesh: &Mesh1D, rule: &GaussLegendre) -> Vec<ElementRule> {
    (0..mesh.element_count())
        .map(|e| {
            let (a, b) = mesh.element(e);
            let h = b - a;
            let mut r = ElementRule {
                points: [0.0; QUADRATURE_POINTS],
                left: [0.0; QUADRATURE_POINTS],
                right: [0.0; QUADRATURE_POINTS],
            };
            for (q, (x, w)) in rule.mapped(a, b).enumerate() {
                r.points[q] = x;
                r.left[q] = w * (b - x) / h;
                r.right[q] = w * (x - a) / h;
            }
            r
        })
        .collect()
}

/// Galerkin matrix `A[i][j] = B(φ_j, φ_i)` together with its factorisation.
#[derive(Debug, Clone)]
pub struct StiffnessMatrix {
    matrix: Tridiagonal,
    lu: TridiagonalLu,
}

impl StiffnessMatrix {
    pub fn matrix(&self) -> &Tridiagonal {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `A⁻¹ b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.lu.solve(b)
    }

    pub fn solve_in_place(&self, b: &mut [f64]) {
        self.lu.solve_in_place(b)
    }

    /// `A⁻ᵀ b`.
    pub fn solve_transpose_in_place(&self, b: &mut [f64]) {
        self.lu.solve_transpose_in_place(b)
    }
}

pub fn assemble_stiffness(op: &Operator1D, mesh: &Mesh1D) -> Result<StiffnessMatrix> {
    let n = mesh.n_fe();
    let rule = GaussLegendre::new(QUADRATURE_POINTS);
    let mut a = Tridiagonal::zeros(n);
    // Size of the uncancelled contributions, to tell a vanishing pivot from a small one.
    let mut magnitude = 0.0f64;
    for e in 0..mesh.element_count() {
        let (xa, xb) = mesh.element(e);
        let h = xb - xa;
        // local[test][trial] over (left, right)
        let mut local = [[0.0; 2]; 2];
        for (x, w) in rule.mapped(xa, xb) {
            let phi = [(xb - x) / h, (x - xa) / h];
            let dphi = [-1.0 / h, 1.0 / h];
            let (ca, cb, cc) = (op.diffusion(x), op.advection(x), op.reaction(x));
            for test in 0..2 {
                for trial in 0..2 {
                    let terms = [
                        ca * dphi[trial] * dphi[test],
                        cb * dphi[trial] * phi[test],
                        cc * phi[trial] * phi[test],
                    ];
                    local[test][trial] += w * terms.iter().sum::<f64>();
                    magnitude = magnitude.max(w * terms.iter().map(|t| t.abs()).sum::<f64>());
                }
            }
        }
        // Full node k is interior index k - 1; boundary nodes are eliminated.
        let interior = |k: usize| (k >= 1 && k <= n).then(|| k - 1);
        for test in 0..2 {
            for trial in 0..2 {
                let (Some(i), Some(j)) = (interior(e + test), interior(e + trial)) else {
                    continue;
                };
                let v = local[test][trial];
                if i == j {
                    a.diag[i] += v;
                } else if i > j {
                    a.sub[j] += v;
                } else {
                    a.sup[i] += v;
                }
            }
        }
    }
    let lu = a.factor_with_scale(magnitude).map_err(|err| match err {
        Error::NonCoercive { row, pivot } => {
            log::error!("operator {} is not coercive on a mesh with {n} nodes", op.label());
            Error::NonCoercive { row, pivot }
        }
        other => other,
    })?;
    Ok(StiffnessMatrix { matrix: a, lu })
}

/// Load vector `b_i = ∫ f φ_i`.
pub fn assemble_load<F: Fn(f64) -> f64 + ?Sized>(f: &F, mesh: &Mesh1D) -> Vec<f64> {
    let n = mesh.n_fe();
    let rule = GaussLegendre::new(QUADRATURE_POINTS);
    let mut load = vec![0.0; n];
    for (e, r) in element_rules(mesh, &rule).iter().enumerate() {
        let (mut left, mut right) = (0.0, 0.0);
        for q in 0..QUADRATURE_POINTS {
            let fx = f(r.points[q]);
            left += r.left[q] * fx;
            right += r.right[q] * fx;
        }
        if e >= 1 {
            load[e - 1] += left;
        }
        if e < n {
            load[e] += right;
        }
    }
    load
}

/// A piecewise-linear finite element function vanishing at both ends.
#[derive(Debug, Clone)]
pub struct FeFunction {
    mesh: Arc<Mesh1D>,
    coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn new(mesh: Arc<Mesh1D>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.n_fe() {
            return Err(Error::DimensionMismatch {
                expected: mesh.n_fe(),
                got: coeffs.len(),
            });
        }
        Ok(Self { mesh, coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.mesh.interpolate(&self.coeffs, x)
    }
}

/// Galerkin solution of `L u = f`, `u(0) = u(1) = 0`.
pub fn fem_solve<F: Fn(f64) -> f64 + ?Sized>(
    op: &Operator1D,
    mesh: &Mesh1D,
    f: &F,
) -> Result<FeFunction> {
    let a = assemble_stiffness(op, mesh)?;
    let coeffs = a.solve(&assemble_load(f, mesh));
    FeFunction::new(Arc::new(mesh.clone()), coeffs)
}

/// Kernel Gram matrix of the basis, `M_ij = ∬ φ_i(x) K(x, y) φ_j(y) dx dy`.
pub fn assemble_m<K: Kernel + ?Sized>(kernel: &K, mesh: &Mesh1D, mode: MMode) -> Result<DMatrix<f64>> {
    if kernel.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: kernel.dim(),
        });
    }
    let m = match mode {
        MMode::Exact => exact_m(kernel, mesh),
        MMode::Lumped => lumped_m(kernel, mesh),
    };
    Ok(m)
}

fn lumped_m<K: Kernel + ?Sized>(kernel: &K, mesh: &Mesh1D) -> DMatrix<f64> {
    let n = mesh.n_fe();
    let nodes = mesh.interior_nodes();
    let mass: Vec<f64> = (0..n).map(|i| mesh.hat_integral(i)).collect();
    let mut m = DMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let v = mass[i] * kernel.eval1(nodes[i], nodes[j]) * mass[j];
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

fn exact_m<K: Kernel + ?Sized>(kernel: &K, mesh: &Mesh1D) -> DMatrix<f64> {
    let n = mesh.n_fe();
    let rule = GaussLegendre::new(QUADRATURE_POINTS);
    let rules = element_rules(mesh, &rule);
    // Accumulate over all nodes, boundary included, and drop the boundary rows at the end.
    let full = n + 2;
    let mut acc = DMatrix::<f64>::zeros(full, full);
    let mut kq = [[0.0; QUADRATURE_POINTS]; QUADRATURE_POINTS];
    for (f, rf) in rules.iter().enumerate() {
        for (e, re) in rules.iter().enumerate().take(f + 1) {
            for q in 0..QUADRATURE_POINTS {
                for r in 0..QUADRATURE_POINTS {
                    kq[q][r] = kernel.eval1(re.points[q], rf.points[r]);
                }
            }
            let mut block = [[0.0; 2]; 2];
            for q in 0..QUADRATURE_POINTS {
                let (wl, wr) = (re.left[q], re.right[q]);
                let (mut sl, mut sr) = (0.0, 0.0);
                for r in 0..QUADRATURE_POINTS {
                    sl += kq[q][r] * rf.left[r];
                    sr += kq[q][r] * rf.right[r];
                }
                block[0][0] += wl * sl;
                block[0][1] += wl * sr;
                block[1][0] += wr * sl;
                block[1][1] += wr * sr;
            }
            for a in 0..2 {
                for b in 0..2 {
                    acc[(e + a, f + b)] += block[a][b];
                    if e != f {
                        acc[(f + b, e + a)] += block[a][b];
                    }
                }
            }
        }
    }
    let mut m = acc.view((1, 1), (n, n)).into_owned();
    symmetrize(&mut m);
    m
}

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}
