//! Explicit lower barriers for `ℒ = -Δ + (-Δ)^s` near a boundary point.
//!
//! The barrier starts from a ladder of powers `x_+^{α_j}` whose fractional
//! Laplacians cancel each other's local part, adds a logarithmic corrector,
//! and is then convexified near the origin. All existential constants are
//! measured on grids and shipped with the parameters as a certificate.

mod build;
mod fields;
mod ladder;
mod theta;

pub use build::{
    beta, build_barrier, gamma, geometric_grid, BarrierParams, Certificate, CertificateCheck,
    DEFAULT_TRUNCATION_RADIUS,
};
pub use fields::{w_alpha, BetaField, BetaShape, GammaField, Monomial, TOP_CAP};
pub use ladder::{build_ladder, coefficients, kappa, ExponentLadder, LadderCase};
pub use theta::{check_truncation, tail_kappa, theta, ThetaField};
