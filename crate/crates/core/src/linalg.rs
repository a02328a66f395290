//! Small dense and banded solvers used by the assembly and conditioning code.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// A square tridiagonal matrix stored by its three bands.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    /// `sub[i]` is entry `(i + 1, i)`.
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    /// `sup[i]` is entry `(i, i + 1)`.
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self {
            sub: vec![0.0; n.saturating_sub(1)],
            diag: vec![0.0; n],
            sup: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(i, j)`, zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.sub[j]
        } else if j == i + 1 {
            self.sup[i]
        } else {
            0.0
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.get(i, j))
    }

    pub fn is_symmetric(&self) -> bool {
        self.sub == self.sup
    }

    /// LU factorisation without pivoting (Thomas algorithm).
    pub fn factor(&self) -> Result<TridiagonalLu> {
        let scale = self
            .diag
            .iter()
            .chain(&self.sub)
            .chain(&self.sup)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        self.factor_with_scale(scale)
    }

    /// As [`Tridiagonal::factor`], treating pivots below `1e-14 * scale` as zero.
    pub fn factor_with_scale(&self, scale: f64) -> Result<TridiagonalLu> {
        let n = self.dim();
        let tiny = scale * 1e-14;
        let mut lower = vec![0.0; n.saturating_sub(1)];
        let mut pivots = vec![0.0; n];
        for i in 0..n {
            let mut p = self.diag[i];
            if i > 0 {
                let l = self.sub[i - 1] / pivots[i - 1];
                lower[i - 1] = l;
                p -= l * self.sup[i - 1];
            }
            if !p.is_finite() || p.abs() <= tiny {
                return Err(Error::NonCoercive { row: i, pivot: p });
            }
            pivots[i] = p;
        }
        Ok(TridiagonalLu {
            lower,
            pivots,
            sup: self.sup.clone(),
        })
    }
}

/// Factors of a tridiagonal matrix `A = L U`, reusable for many right-hand sides.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<f64>,
    pivots: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalLu {
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 1..n {
            b[i] -= self.lower[i - 1] * b[i - 1];
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                b[i] -= self.sup[i] * b[i + 1];
            }
            b[i] /= self.pivots[i];
        }
    }

    /// Solves `Aᵀ x = b` in place.
    pub fn solve_transpose_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            if i > 0 {
                b[i] -= self.sup[i - 1] * b[i - 1];
            }
            b[i] /= self.pivots[i];
        }
        for i in (0..n.saturating_sub(1)).rev() {
            b[i] -= self.lower[i] * b[i + 1];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DMatrix<f64>,
}

impl Cholesky {
    /// Factorises `a`, reading only its lower triangle. On failure the error
    /// carries the smallest pivot seen, including the offending one.
    pub fn new(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: a.ncols(),
            });
        }
        let mut l = DMatrix::<f64>::zeros(n, n);
        let mut smallest = f64::INFINITY;
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            smallest = smallest.min(d);
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Factorization {
                    row: j,
                    pivot: if d.is_nan() { d } else { smallest },
                });
            }
            let ljj = d.sqrt();
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / ljj;
            }
        }
        Ok(Self { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn factor(&self) -> &DMatrix<f64> {
        &self.l
    }

    /// Solves `L z = b` in place.
    pub fn forward_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[(i, k)] * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
    }

    /// Solves `Lᵀ x = z` in place.
    pub fn backward_in_place(&self, b: &mut [f64]) {
        let n = self.dim();
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * b[k];
            }
            b[i] = s / self.l[(i, i)];
        }
    }

    /// Solves `(L Lᵀ) x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        x
    }
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(a: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(a.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest diagonal entry in absolute value.
pub fn max_abs_diagonal(a: &DMatrix<f64>) -> f64 {
    a.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Relative PSD tolerance: eigenvalues down to `-PSD_TOLERANCE * max|diag|` are accepted.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Whether `a` is positive-semidefinite up to [`PSD_TOLERANCE`].
pub fn is_psd(a: &DMatrix<f64>) -> bool {
    min_eigenvalue(a) >= -PSD_TOLERANCE * max_abs_diagonal(a)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
pub(crate) fn to_dvector(v: &[f64]) -> nalgebra::DVector<f64> {
    nalgebra::DVector::from_column_slice(v)
}
