//! Numerical spectral analysis of the Dirichlet deformation operator
//!
//! ```text
//! C = pi * (1 + (hbar^2 / c^2) d^2/dv^2)   on [-v_c, v_c],  psi(+-v_c) = 0
//! ```
//!
//! with `v_c = c * sqrt(1 - 1/pi)` the point where the deformation profile
//! `C(v) = pi (1 - v^2/c^2)` drops to one.
//!
//! The crate checks the operator's structural properties numerically:
//!
//! * [`symmetry`]: Green's identity and the vanishing of the symmetry
//!   residual on Dirichlet functions, with Gauss-Legendre inner products.
//! * [`deficiency`]: the deficiency equation `psi'' = mu^2 psi`, its Dirichlet
//!   boundary determinant, and an independent complex RK4 shooting check.
//! * [`spectrum`] and [`eigensolver`]: the analytic sine spectrum and a
//!   Sturm-bisection / inverse-iteration solver on the finite-difference matrix.
//! * [`cli`]: configuration, report assembly and the `sturmkit` front end.

pub mod cli;
pub mod deficiency;
pub mod eigensolver;
mod error;
pub mod function;
pub mod operator;
pub mod quadrature;
pub mod spectrum;
pub mod symmetry;

pub use error::{Error, Result};
pub use function::TestFunction;
pub use operator::{
    apply_operator, build_grid, critical_velocity, deformation_value, discretize, Grid,
    IntervalDomain, OperatorSpec, PhysicalConstants, SymmetricTridiagonal,
};

pub use num_complex::Complex64;
