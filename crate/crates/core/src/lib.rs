//! Mixed local/nonlocal operators `-Δ + (-Δ)^s`: pointwise evaluation,
//! one-dimensional finite element solves, barrier construction and
//! numerical verification of maximum principles and boundary regularity.

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assembly;
pub mod barrier;
pub mod error;
pub mod fields;
pub mod kernel;
pub mod linalg;
pub mod quadrature;
pub mod solve;
pub mod verify;

pub use assembly::{
    bilinear_eval, build_mesh, load_vector, local_stiffness, nonlocal_stiffness, GridFunction,
    Mesh, OperatorParts, StiffnessSystem,
};
pub use error::{Error, Result};
pub use kernel::{
    frac_apply, mixed_apply, normalization_constant, tail_integral, Kink, LocalSign,
    OperatorParams, QuadratureSpec, ScalarField, TailClass, TailIntegral,
};
pub use solve::{lift_nonhomogeneous, solve_dirichlet, solve_sampled, SolveReport};
