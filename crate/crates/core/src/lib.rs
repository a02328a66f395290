//! Statistical finite elements for 1D elliptic problems.
//!
//! A Gaussian process prior on the source term of `Lu = f` is pushed through
//! a piecewise-linear finite element discretisation of `L`, giving a prior on
//! the solution `u`. That prior is conditioned on noisy point observations,
//! optionally with an additive discrepancy kernel. The [`oracle`] module holds
//! a closed-form Green's function reference for Poisson's equation and the
//! [`experiments`] module reproduces the convergence study end to end.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod gp;
pub mod kernels;
pub mod linalg;
pub mod oracle;
pub mod quadrature;

pub use error::{Error, Result};
