//! Piecewise-linear finite elements on `(0, 1)` with homogeneous Dirichlet
//! conditions, and the Gaussian process prior they induce on the solution.

mod assembly;
mod mesh;
mod operator;
mod prior;

pub use assembly::{
    assemble_load, assemble_m, assemble_stiffness, fem_solve, FeFunction, MMode, StiffnessMatrix,
    QUADRATURE_POINTS,
};
pub use mesh::Mesh1D;
pub use operator::{Coefficient, Operator1D};
pub use prior::{induced_prior, InducedPrior};
