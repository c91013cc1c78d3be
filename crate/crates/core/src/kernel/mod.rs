//! Pointwise evaluation of the fractional Laplacian and of the mixed
//! operators `-Δ + (-Δ)^s` and `Δ + (-Δ)^s` on explicitly given functions.
//!
//! Every evaluation uses the second-difference form
//!
//! ```text
//! (-Δ)^s u(x) = -(c_{N,s} / 2) ∫ (u(x+z) + u(x-z) - 2u(x)) / |z|^{N+2s} dz,
//! ```
//!
//! reduced to line integrals along directions of the unit sphere. Each line
//! integral is split at the points where the field is not smooth, the
//! innermost piece is integrated from the local Taylor expansion, and the part
//! beyond the outer radius is handled from the field's [`TailClass`].

mod apply;
mod constant;
mod field;

pub use apply::{frac_apply, mixed_apply, tail_integral, TailIntegral};
pub use constant::normalization_constant;
pub(crate) use constant::sphere_area;
pub(crate) use field::norm as norm_of;
pub use field::{Kink, ScalarField, TailClass};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Sign in front of the local part of the operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LocalSign {
    /// `ℒ = -Δ + (-Δ)^s`.
    Minus,
    /// `ℒ' = Δ + (-Δ)^s`, the wrong-sign operator.
    Plus,
}

/// Dimension, fractional order and local sign of the operator, together
/// with the cached normalization constant `c_{N,s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorParams {
    dim: usize,
    s: f64,
    local_sign: LocalSign,
    c_ns: f64,
}

impl OperatorParams {
    pub fn new(dim: usize, s: f64, local_sign: LocalSign) -> Result<Self> {
        let c_ns = normalization_constant(dim, s)?;
        Ok(Self {
            dim,
            s,
            local_sign,
            c_ns,
        })
    }

    /// One-dimensional `ℒ = -Δ + (-Δ)^s`.
    pub fn mixed_1d(s: f64) -> Result<Self> {
        Self::new(1, s, LocalSign::Minus)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn local_sign(&self) -> LocalSign {
        self.local_sign
    }

    pub fn c_ns(&self) -> f64 {
        self.c_ns
    }

    pub fn with_sign(mut self, local_sign: LocalSign) -> Self {
        self.local_sign = local_sign;
        self
    }
}

/// Controls for the pointwise quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Upper bound for the second-difference zone around the evaluation point.
    pub inner_radius: f64,
    /// Lower bound for the radius beyond which the tail model is used.
    pub outer_radius: f64,
    /// Gauss panels per unit of `ln |z|` in numerically integrated tails.
    pub panels: usize,
    pub tolerance: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            inner_radius: 0.5,
            outer_radius: 8.0,
            panels: 1,
            tolerance: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(tolerance: f64) -> Self {
        Self {
            tolerance,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.inner_radius > 0.0 && self.inner_radius < self.outer_radius) {
            return domain("quadrature spec needs 0 < inner_radius < outer_radius");
        }
        if !(self.tolerance > 0.0) || self.panels == 0 {
            return domain("quadrature spec needs tolerance > 0 and panels >= 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_cache_the_constant() {
        let p = OperatorParams::mixed_1d(0.5).unwrap();
        assert!((p.c_ns() - std::f64::consts::FRAC_1_PI).abs() < 1e-12);
        assert_eq!(p.with_sign(LocalSign::Plus).local_sign(), LocalSign::Plus);
        assert!(OperatorParams::mixed_1d(1.0).is_err());
        assert!(OperatorParams::new(0, 0.5, LocalSign::Minus).is_err());
    }

    #[test]
    fn quadrature_spec_validation() {
        assert!(QuadratureSpec::default().validate().is_ok());
        let bad = QuadratureSpec {
            inner_radius: 2.0,
            outer_radius: 1.0,
            ..QuadratureSpec::default()
        };
        assert!(bad.validate().is_err());
    }
}
